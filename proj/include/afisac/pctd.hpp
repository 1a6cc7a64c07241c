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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>

#include "sic.hpp"

namespace afisac
{
    using CMatrix = Eigen::MatrixXcd;

    enum class PadPolicy
    {
        NextEvenSquare
    };

    // Where the Rayleigh floor behind the threshold is estimated.
    enum class FloorMode
    {
        PerGate, // median over the Doppler rows of each range gate
        Global,  // one median over all active gates
        Thermal  // receiver noise alone, known from the link budget rather than the map
    };

    struct PctdConfig
    {
        std::size_t z_p = 2;
        double detector_pfa = 1e-6;
        PadPolicy pad_policy = PadPolicy::NextEvenSquare;
        std::optional<double> noise_sigma; // known floor; median estimate when unset
        std::size_t gates = 64;            // range gates of the matched-filter stage
        double slow_time_beta = 6.0;       // Kaiser taper across radar symbols
        FloorMode floor_mode = FloorMode::PerGate;

        void validate() const
        {
            if (z_p < 1)
                throw ConfigError("pctd: z_p must be >= 1");
            if (!(detector_pfa > 0.0 && detector_pfa < 1.0))
                throw ConfigError("pctd: detector_pfa must lie in (0, 1)");
            if (gates < 1)
                throw ConfigError("pctd: gates must be >= 1");
        }
    };

    // Smallest even K with K * K >= n.
    inline std::size_t pctd_side(std::size_t n)
    {
        std::size_t k = std::size_t(std::ceil(std::sqrt(double(n))));
        while (k * k < n)
            ++k;
        if (k % 2)
            ++k;
        return std::max<std::size_t>(k, 2);
    }

    inline cvec coerce_square(const cvec &r)
    {
        const std::size_t K = pctd_side(r.size());
        cvec out(r);
        out.resize(K * K, 0.0);
        return out;
    }

    // Column-major fill of the K x K block, zero-padded to N_zp x N_zp.
    inline CMatrix reshape_zero_pad(const cvec &r, const PctdConfig &cfg)
    {
        const cvec x = coerce_square(r);
        const std::size_t K = pctd_side(x.size());
        const std::size_t nzp = cfg.z_p * K;
        CMatrix M = CMatrix::Zero(Eigen::Index(nzp), Eigen::Index(nzp));
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t p = 0; p < K; ++p)
                M(Eigen::Index(p), Eigen::Index(a)) = x[p + K * a];
        return M;
    }

    inline CMatrix reshape_zero_pad(const Signal &r, const PctdConfig &cfg) { return reshape_zero_pad(r.samples, cfg); }

    namespace detail
    {
        inline void column_idft(CMatrix &M, std::size_t active_cols)
        {
            const std::size_t n = std::size_t(M.rows());
            cvec col(n), out(n);
            const double s = 1.0 / std::sqrt(double(n));
            for (std::size_t c = 0; c < active_cols; ++c)
            {
                for (std::size_t i = 0; i < n; ++i)
                    col[i] = M(Eigen::Index(i), Eigen::Index(c));
                fft_raw(col.data(), out.data(), n, FFTW_BACKWARD);
                for (std::size_t i = 0; i < n; ++i)
                    M(Eigen::Index(i), Eigen::Index(c)) = out[i] * s;
            }
        }
    }

    // Column-wise IDFT of the reshaped, zero-padded matrix.
    inline CMatrix doppler_pctd(const cvec &r, const PctdConfig &cfg)
    {
        CMatrix M = reshape_zero_pad(r, cfg);
        detail::column_idft(M, pctd_side(r.size()));
        return M;
    }

    // Column c of the delay matrix holds the K DFT bins centred on K c, so each column is a
    // band-limited delay profile for one slow-time frequency. Column IDFT, then rows rotated so
    // that zero delay sits on row N_zp / 2.
    inline CMatrix delay_pctd(const cvec &r, const PctdConfig &cfg)
    {
        const cvec R = fft_unitary(coerce_square(r));
        const std::size_t K = pctd_side(R.size()), KK = K * K;
        const std::size_t n = cfg.z_p * K;
        const std::int64_t h = std::int64_t(K / 2);
        CMatrix M = CMatrix::Zero(Eigen::Index(n), Eigen::Index(n));
        for (std::size_t c = 0; c < K; ++c)
            for (std::int64_t j = -h; j < h; ++j)
            {
                const std::size_t src = std::size_t((std::int64_t(K * c) + j + std::int64_t(KK)) % std::int64_t(KK));
                const std::size_t row = std::size_t((j + std::int64_t(n)) % std::int64_t(n));
                M(Eigen::Index(row), Eigen::Index(c)) = R[src];
            }
        detail::column_idft(M, K);
        const Eigen::Index half = Eigen::Index(n / 2);
        CMatrix S(M.rows(), M.cols());
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            S.row((i + half) % M.rows()) = M.row(i);
        return S;
    }

    inline CMatrix doppler_pctd(const Signal &r, const PctdConfig &cfg) { return doppler_pctd(r.samples, cfg); }
    inline CMatrix delay_pctd(const Signal &r, const PctdConfig &cfg) { return delay_pctd(r.samples, cfg); }

    // Symmetric Kaiser taper over n slow-time samples.
    inline rvec slow_time_taper(std::size_t n, double beta)
    {
        rvec w(n, 1.0);
        if (n < 2 || beta <= 0.0)
            return w;
        const double c = 0.5 * double(n - 1), den = bessel_i0(beta);
        for (std::size_t p = 0; p < n; ++p)
        {
            const double t = (double(p) - c) / c;
            w[p] = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / den;
        }
        return w;
    }

    // Range-gated least-squares channel estimate against the transmitted radar symbols. Gate a of
    // symbol p lands at index p + K a, so PCTD columns are gates and rows are slow time.
    inline Signal post_code(const Signal &r_obs, const std::vector<cvec> &symbols, const AfdmConfig &afdm,
                            const PctdConfig &cfg)
    {
        require_domain(r_obs, Domain::Time, "post_code");
        const std::size_t M = symbols.size(), N = afdm.n_r, L = afdm.l_cpp, G = cfg.gates;
        const std::size_t K = pctd_side(std::max(M, G) * std::max(M, G));
        const std::size_t n_obs = r_obs.size();
        const rvec taper = slow_time_taper(M, cfg.slow_time_beta);
        cvec h(K * K, 0.0);
        for (std::size_t p = 0; p < M; ++p)
        {
            const cvec &ref = symbols[p];
            if (ref.size() != N)
                throw DimensionError("post_code: reference symbol length != n_r");
            const double e = energy(ref);
            if (e == 0.0)
                continue;
            const double w = taper[p] / e;
            const std::size_t start = p * (N + L) + L;
            for (std::size_t a = 0; a < G; ++a)
            {
                cplx acc = 0.0;
                for (std::size_t n = 0; n < N; ++n)
                    acc += std::conj(ref[n]) * r_obs[(start + a + n) % n_obs];
                h[p + K * a] = w * acc;
            }
        }
        return Signal(std::move(h), Domain::Time);
    }

    struct RangeDopplerMap
    {
        CMatrix doppler_matrix;
        CMatrix delay_matrix;
        std::size_t side = 0;     // K
        std::size_t z_p = 1;
        std::size_t gates = 0;    // active columns of the Doppler matrix
        std::size_t symbols = 0;  // slow-time samples
        rvec range_axis_m;        // per delay-matrix row
        rvec velocity_axis_mps;   // per Doppler-matrix row
        double range_per_gate_m = 1.0;
        double velocity_per_cycle_mps = 1.0; // velocity for one cycle per radar symbol
        double gate_bias = 0.0; // slow-time centroid leaking into the delay axis, in gates
        double ridge_per_cycle = 0.0; // chirp delay-Doppler coupling, gates per Doppler cycle

        std::size_t n_zp() const { return side * z_p; }

        // Doppler-matrix row -> cycles per symbol in [-1/2, 1/2).
        double row_to_cycles(double row) const
        {
            double f = row / double(n_zp());
            f -= std::floor(f + 0.5);
            return f;
        }

        // Delay-matrix row -> gate offset, corrected for the slow-time centroid.
        double row_to_gate(double row) const
        {
            const double n = double(n_zp());
            double r = std::fmod(row - n / 2.0 + n, n);
            return r / double(z_p) - gate_bias;
        }
    };

    inline RangeDopplerMap build_rdm(const Signal &h, std::size_t symbols, std::size_t gates, const FrameConfig &frame,
                                     const PctdConfig &cfg)
    {
        cfg.validate();
        RangeDopplerMap map;
        map.side = pctd_side(h.size());
        map.z_p = cfg.z_p;
        map.gates = std::min(gates, map.side);
        map.symbols = symbols;
        // h[p + K a] puts symbol p at delay a + p / K; the symmetric taper centres this on (M - 1) / 2.
        map.gate_bias = symbols > 0 ? 0.5 * double(symbols - 1) / double(map.side) : 0.0;
        map.doppler_matrix = doppler_pctd(h, cfg);
        map.delay_matrix = delay_pctd(h, cfg);
        map.range_per_gate_m = bins_to_range(1.0, frame);
        const double nr = double(frame.afdm.n_r), ns = double(frame.afdm.n_r + frame.afdm.l_cpp);
        map.velocity_per_cycle_mps = bins_to_velocity(nr / ns, frame);
        // A Doppler of kappa bins moves the chirp correlation peak by kappa / (2 n_r c1) samples.
        const double c1 = frame.afdm.c1.value();
        map.ridge_per_cycle = c1 != 0.0 ? 1.0 / (2.0 * ns * c1) : 0.0;
        const std::size_t n = map.n_zp();
        map.range_axis_m.resize(n);
        map.velocity_axis_mps.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            map.range_axis_m[i] = map.row_to_gate(double(i)) * map.range_per_gate_m;
            map.velocity_axis_mps[i] = map.row_to_cycles(double(i)) * map.velocity_per_cycle_mps;
        }
        return map;
    }

    inline double pfa_threshold(double sigma_i, double p_fa)
    {
        if (!(p_fa > 0.0 && p_fa < 1.0))
            throw ConfigError("pfa_threshold: p_fa must lie in (0, 1)");
        return sigma_i * std::sqrt(-std::log(p_fa));
    }

    struct Detection
    {
        double range_m = 0.0;
        double velocity_mps = 0.0;
        double magnitude = 0.0;
        std::size_t doppler_row = 0;
        std::size_t gate = 0;
        std::size_t delay_row = 0;
        double gate_fine = 0.0;
        double cycles = 0.0;
    };

    struct Estimate
    {
        std::vector<Detection> detections;
        std::vector<int> truth_assoc; // detection index per truth, -1 for a miss
        rvec gate_sigma;              // noise scale behind the threshold of each gate
        double sigma = 0.0;           // median of gate_sigma
        double zeta = 0.0;            // threshold for sigma
    };

    inline double map_floor(const RangeDopplerMap &map)
    {
        const CMatrix &D = map.doppler_matrix;
        cvec v;
        v.reserve(std::size_t(D.rows()) * map.gates);
        for (std::size_t c = 0; c < map.gates; ++c)
            for (Eigen::Index r = 0; r < D.rows(); ++r)
                v.push_back(D(r, Eigen::Index(c)));
        return rayleigh_floor(v);
    }

    // Windowing leaves residual noise on the gates that alias onto the locked affine bins, so the
    // floor is estimated per gate unless a global floor is requested.
    inline rvec gate_floors(const RangeDopplerMap &map, FloorMode mode)
    {
        if (mode == FloorMode::Thermal)
            throw ConfigError("thermal floor needs the receiver noise; set noise_sigma or detect through the pipeline");
        if (mode == FloorMode::Global)
            return rvec(map.gates, map_floor(map));
        const CMatrix &D = map.doppler_matrix;
        rvec f(map.gates);
        cvec col(std::size_t(D.rows()));
        for (std::size_t c = 0; c < map.gates; ++c)
        {
            for (Eigen::Index r = 0; r < D.rows(); ++r)
                col[std::size_t(r)] = D(r, Eigen::Index(c));
            f[c] = rayleigh_floor(col);
        }
        return f;
    }

    inline rvec gate_sigma(const RangeDopplerMap &map, const PctdConfig &cfg)
    {
        return cfg.noise_sigma ? rvec(map.gates, *cfg.noise_sigma) : gate_floors(map, cfg.floor_mode);
    }

    // Threshold, 8-neighbour local maxima on the Doppler matrix, fine delay from the delay matrix.
    inline Estimate detect(const RangeDopplerMap &map, const PctdConfig &cfg, const rvec &sigma)
    {
        if (sigma.size() != map.gates)
            throw DimensionError("detect: one noise scale per gate required");
        Estimate est;
        est.gate_sigma = sigma;
        rvec tmp = sigma;
        if (!tmp.empty())
        {
            std::nth_element(tmp.begin(), tmp.begin() + std::ptrdiff_t(tmp.size() / 2), tmp.end());
            est.sigma = tmp[tmp.size() / 2];
        }
        est.zeta = pfa_threshold(est.sigma, cfg.detector_pfa);
        const double k = pfa_threshold(1.0, cfg.detector_pfa);
        const CMatrix &D = map.doppler_matrix;
        const Eigen::Index rows = D.rows();
        const Eigen::Index cols = Eigen::Index(map.gates);
        // Round-off floor so that noise-free maps do not report numerical dust.
        double peak = 0.0;
        for (Eigen::Index c = 0; c < cols; ++c)
            peak = std::max(peak, D.col(c).cwiseAbs().maxCoeff());
        const double dust = 1e-9 * peak;
        for (Eigen::Index c = 0; c < cols; ++c)
        {
            const double floor_v = std::max(k * sigma[std::size_t(c)], dust);
            for (Eigen::Index r = 0; r < rows; ++r)
            {
                const double v = std::abs(D(r, c));
                if (v < floor_v || v == 0.0)
                    continue;
                bool is_max = true;
                for (int dr = -1; dr <= 1 && is_max; ++dr)
                    for (int dc = -1; dc <= 1; ++dc)
                    {
                        if (dr == 0 && dc == 0)
                            continue;
                        Eigen::Index cc = c + dc;
                        if (cc < 0 || cc >= cols)
                            continue;
                        Eigen::Index rr = (r + dr + rows) % rows;
                        const double w = std::abs(D(rr, cc));
                        if (w > v || (w == v && (dc < 0 || (dc == 0 && dr < 0))))
                        {
                            is_max = false;
                            break;
                        }
                    }
                if (!is_max)
                    continue;
                Detection d;
                d.doppler_row = std::size_t(r);
                d.gate = std::size_t(c);
                d.magnitude = v;
                d.cycles = map.row_to_cycles(double(r));
                est.detections.push_back(d);
            }
        }

        const CMatrix &Y = map.delay_matrix;
        const std::size_t K = map.side, n = map.n_zp();
        for (auto &d : est.detections)
        {
            // Slow-time tone -d.cycles is centred on delay-matrix column round(frac(-cycles) K).
            double f = -d.cycles;
            f -= std::floor(f);
            const std::int64_t col0 = std::int64_t(std::llround(f * double(K))) % std::int64_t(K);
            const std::int64_t row0 = std::int64_t(d.gate * map.z_p + n / 2) % std::int64_t(n);
            double best = -1.0;
            std::int64_t best_row = row0;
            const std::int64_t span = std::int64_t(map.z_p);
            for (std::int64_t dc = -1; dc <= 1; ++dc)
                for (std::int64_t dr = -span; dr <= 2 * span; ++dr)
                {
                    std::int64_t cc = (col0 + dc + std::int64_t(K)) % std::int64_t(K);
                    std::int64_t rr = (row0 + dr + std::int64_t(n)) % std::int64_t(n);
                    double v = std::abs(Y(Eigen::Index(rr), Eigen::Index(cc)));
                    if (v > best)
                    {
                        best = v;
                        best_row = rr;
                    }
                }
            d.delay_row = std::size_t(best_row);
            d.gate_fine = map.row_to_gate(double(best_row)) + d.cycles * map.ridge_per_cycle;
            d.range_m = d.gate_fine * map.range_per_gate_m;
            d.velocity_mps = d.cycles * map.velocity_per_cycle_mps;
        }
        std::sort(est.detections.begin(), est.detections.end(),
                  [](const Detection &a, const Detection &b) { return a.magnitude > b.magnitude; });
        return est;
    }

    inline Estimate detect(const RangeDopplerMap &map, const PctdConfig &cfg)
    {
        return detect(map, cfg, gate_sigma(map, cfg));
    }
}
