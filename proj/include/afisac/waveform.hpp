// afisac: affine-domain full-duplex ISAC link simulator
// Copyright (C) 2026 The afisac Authors
//
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <random>

#include "transforms.hpp"

namespace afisac
{
    using Rng = std::mt19937_64;

    struct ModAlphabet
    {
        int order = 4;
        bool unit_power = true;

        void validate() const
        {
            if (order != 4 && order != 16 && order != 64)
                throw ConfigError("QAM order must be 4, 16 or 64");
        }
    };

    struct PilotLayout
    {
        std::size_t n_pilots = 1;
        double pilot_power = 1.0;
        std::size_t guard_size = 0;
        bool data_fill = true;
    };

    struct AfdmConfig
    {
        std::size_t n_r = 128;
        std::size_t m_r = 32;
        Rational c1{3, 128};
        Rational c2{1, 128 * 128};
        std::size_t l_cpp = 16;
        PilotLayout pilot_layout;
        ModAlphabet alphabet;

        DaftParams daft_params() const { return DaftParams(n_r, c1, c2); }

        void validate() const
        {
            if (n_r < 1 || m_r < 1)
                throw ConfigError("afdm: n_r and m_r must be positive");
            if (l_cpp >= n_r)
                throw ConfigError("afdm: l_cpp must be < n_r");
            daft_params().validate();
            alphabet.validate();
            const auto &pl = pilot_layout;
            if (pl.n_pilots > n_r)
                throw ConfigError("afdm: more pilots than carriers");
            if (pl.n_pilots > 0 && (1 + 2 * pl.guard_size) * pl.n_pilots > n_r)
                throw ConfigError("afdm: pilot guards overlap");
            if (pl.pilot_power < 0.0)
                throw ConfigError("afdm: pilot power must be non-negative");
        }
    };

    struct OfdmConfig
    {
        std::size_t n_c = 512;
        std::size_t m_c = 128;
        std::size_t l_cp = 32;
        std::size_t n_c_pilots = 0;
        ModAlphabet alphabet;

        void validate() const
        {
            if (n_c < 1 || m_c < 1)
                throw ConfigError("ofdm: n_c and m_c must be positive");
            if (l_cp >= n_c)
                throw ConfigError("ofdm: l_cp must be < n_c");
            if (n_c_pilots > n_c)
                throw ConfigError("ofdm: more pilots than carriers");
            alphabet.validate();
        }
    };

    // Square QAM point with unit average energy.
    inline cplx qam_symbol(int order, std::uint64_t index, bool unit_power = true)
    {
        int side = order == 4 ? 2 : order == 16 ? 4 : 8;
        int i = int(index % std::uint64_t(side));
        int q = int((index / std::uint64_t(side)) % std::uint64_t(side));
        double re = 2.0 * i - (side - 1), im = 2.0 * q - (side - 1);
        double scale = unit_power ? std::sqrt(2.0 * (order - 1) / 3.0) : 1.0;
        return cplx(re / scale, im / scale);
    }

    inline cvec random_qam(std::size_t n, const ModAlphabet &a, Rng &rng)
    {
        a.validate();
        std::uniform_int_distribution<std::uint64_t> pick(0, std::uint64_t(a.order - 1));
        cvec v(n);
        for (auto &s : v)
            s = qam_symbol(a.order, pick(rng), a.unit_power);
        return v;
    }

    // Fractional part of c * k for signed k.
    inline double frac_signed(const Rational &c, std::int64_t k)
    {
        return k >= 0 ? c.frac_times(std::uint64_t(k)) : -c.frac_times(std::uint64_t(-k));
    }

    inline Signal gen_afdm_symbol(const cvec &data, const AfdmConfig &cfg)
    {
        if (data.size() != cfg.n_r)
            throw DimensionError("gen_afdm_symbol: data length != n_r");
        return Signal(idaft(data, cfg.daft_params()), Domain::Time);
    }

    // Chirp-periodic prefix: s[n] = s[N+n] exp(-j 2 pi c1 (N^2 + 2 N n)), n in [-l_cpp, 0).
    inline Signal append_cpp(const Signal &s, const AfdmConfig &cfg)
    {
        require_domain(s, Domain::Time, "append_cpp");
        const std::size_t N = cfg.n_r, L = cfg.l_cpp;
        if (s.size() != N)
            throw DimensionError("append_cpp: symbol length != n_r");
        cvec out(N + L);
        for (std::size_t i = 0; i < L; ++i)
        {
            std::int64_t n = std::int64_t(i) - std::int64_t(L);
            cplx v = s[std::size_t(std::int64_t(N) + n)];
            if (!cfg.c1.is_zero())
            {
                std::int64_t k = std::int64_t(N) * (std::int64_t(N) + 2 * n);
                double f = frac_signed(cfg.c1, k);
                if (f != 0.0)
                    v *= std::polar(1.0, -2.0 * pi * f);
            }
            out[i] = v;
        }
        std::copy(s.samples.begin(), s.samples.end(), out.begin() + std::ptrdiff_t(L));
        return Signal(std::move(out), Domain::Time);
    }

    inline Signal gen_ofdm_symbol(const cvec &data, const OfdmConfig &cfg)
    {
        if (data.size() != cfg.n_c)
            throw DimensionError("gen_ofdm_symbol: data length != n_c");
        return Signal(ifft_unitary(data), Domain::Time);
    }

    inline Signal append_cp(const Signal &s, std::size_t l_cp)
    {
        require_domain(s, Domain::Time, "append_cp");
        if (l_cp > s.size())
            throw DimensionError("append_cp: prefix longer than symbol");
        cvec out;
        out.reserve(s.size() + l_cp);
        out.insert(out.end(), s.samples.end() - std::ptrdiff_t(l_cp), s.samples.end());
        out.insert(out.end(), s.samples.begin(), s.samples.end());
        return Signal(std::move(out), Domain::Time);
    }

    enum class ChirpKind
    {
        LFM,
        LoRa
    };

    // LFM activates carrier 0 with value x_r; LoRa activates carrier m0.
    inline Signal gen_chirp(ChirpKind kind, const AfdmConfig &cfg, std::size_t m0 = 0, cplx x_r = 1.0)
    {
        cvec x(cfg.n_r, 0.0);
        if (kind == ChirpKind::LFM)
            x[0] = x_r;
        else
        {
            if (m0 >= cfg.n_r)
                throw DimensionError("gen_chirp: m0 out of range");
            x[m0] = 1.0;
        }
        return gen_afdm_symbol(x, cfg);
    }

    inline std::vector<std::size_t> pilot_indices(const PilotLayout &layout, std::size_t n_r)
    {
        std::vector<std::size_t> idx;
        if (layout.n_pilots == 0)
            return idx;
        std::size_t spacing = n_r / layout.n_pilots;
        for (std::size_t i = 0; i < layout.n_pilots; ++i)
            idx.push_back(i * spacing);
        return idx;
    }

    // Pilots at equidistant carriers, guard_size zeros on each side, random data elsewhere.
    inline cvec build_pilot_grid(const PilotLayout &layout, const AfdmConfig &cfg, Rng &rng)
    {
        const std::size_t N = cfg.n_r;
        if (layout.n_pilots > 0 && (1 + 2 * layout.guard_size) * layout.n_pilots > N)
            throw ConfigError("build_pilot_grid: guards overlap adjacent pilots");
        std::vector<char> reserved(N, 0);
        cvec x(N, 0.0);
        const double amp = std::sqrt(layout.pilot_power);
        for (std::size_t p : pilot_indices(layout, N))
        {
            x[p] = amp;
            reserved[p] = 1;
            for (std::size_t g = 1; g <= layout.guard_size; ++g)
            {
                reserved[(p + g) % N] = 1;
                reserved[(p + N - g % N) % N] = 1;
            }
        }
        if (layout.data_fill)
        {
            cvec d = random_qam(N, cfg.alphabet, rng);
            for (std::size_t m = 0; m < N; ++m)
                    if (!reserved[m])
                        x[m] = d[m];
        }
        return x;
    }
}
