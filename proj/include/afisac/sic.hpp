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
#include <cmath>
#include <map>

#include "channel.hpp"

namespace afisac
{
    enum class ResidualMode
    {
        Analytic, // echo + eps_rho * disturbance inside the locked span
        Measured  // Kaiser windows applied to the received affine signal
    };

    enum class ThresholdScale
    {
        Absolute,
        Floor, // multiples of the Rayleigh floor estimated from |y|
        Peak   // fractions of max |y|
    };

    struct SicConfig
    {
        double epsilon = 0.0;
        double epsilon_rho_db = 0.0;
        std::vector<double> threshold_schedule; // explicit zeta values, strictly decreasing
        double zeta1 = 6.0;                      // used when the schedule is empty
        double reduction = 2.0;
        ThresholdScale scale = ThresholdScale::Floor;
        std::size_t n_w = 0;             // 0 selects 2 * n_r_tot
        std::size_t n_w_iter = 0;        // 0 selects n_r_tot
        std::size_t rho_max = 8;
        double kaiser_beta = 4.0;
        ResidualMode mode = ResidualMode::Measured;

        double eps_rho() const { return std::pow(10.0, epsilon_rho_db / 20.0); }

        double zeta(std::size_t u) const // u >= 1
        {
            if (!threshold_schedule.empty())
                return threshold_schedule[std::min(u, threshold_schedule.size()) - 1];
            return zeta1 / std::pow(reduction, double(u - 1));
        }

        void validate() const
        {
            if (epsilon < 0.0 || epsilon > 1.0)
                throw ConfigError("sic: epsilon must lie in [0, 1]");
            if (rho_max < 1)
                throw ConfigError("sic: rho_max must be >= 1");
            for (std::size_t i = 1; i < threshold_schedule.size(); ++i)
                if (!(threshold_schedule[i] < threshold_schedule[i - 1]))
                    throw ConfigError("sic: threshold schedule must be strictly decreasing");
            if (threshold_schedule.empty() && (!(zeta1 > 0.0) || !(reduction > 1.0)))
                throw ConfigError("sic: zeta1 must be positive and reduction > 1");
            if (kaiser_beta < 0.0)
                throw ConfigError("sic: kaiser_beta must be non-negative");
        }
    };

    struct SicResult
    {
        Signal cleaned{cvec{}, Domain::Affine}; // restricted to [m_lo, m_hi)
        std::vector<std::vector<std::size_t>> peak_indices;
        std::size_t iterations_used = 0;
        std::size_t m_lo = 0, m_hi = 0;
        std::size_t n_s = 0;
        std::size_t n_obs = 0;
        bool converged = true;
        rvec gain; // combined window gain over the full observation window
    };

    inline Signal project_affine(const Signal &r, const DaftParams &p) { return daft(r, p); }

    // y - (1 - eps) beta daft(replica)
    inline Signal subtract_si(const Signal &y, const Signal &replica, cplx beta, double eps, const DaftParams &p)
    {
        require_domain(y, Domain::Affine, "subtract_si");
        cvec rep = daft(replica, p).samples;
        cvec out(y.samples);
        const cplx g = (1.0 - eps) * beta;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] -= g * rep[i];
        return Signal(std::move(out), Domain::Affine);
    }

    inline double bessel_i0(double x) { return std::cyl_bessel_i(0.0, x); }

    // w[m] = I0(b sqrt(1 - ((m - c)/c)^2)) / I0(b), c = floor(n/2).
    inline rvec kaiser_window(std::size_t n, double beta_bar)
    {
        if (n == 0)
            throw DimensionError("kaiser_window: n must be >= 1");
        // Monte Carlo loops ask for the same few windows over and over; I0 is not cheap.
        thread_local std::map<std::pair<std::size_t, double>, rvec> cache;
        const auto key = std::make_pair(n, beta_bar);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
        rvec w(n, 1.0);
        if (n > 1 && beta_bar != 0.0)
        {
            const double c = double(n / 2);
            const double den = bessel_i0(beta_bar);
            for (std::size_t m = 0; m < n; ++m)
            {
                double t = (double(m) - c) / c;
                w[m] = bessel_i0(beta_bar * std::sqrt(std::max(0.0, 1.0 - t * t))) / den;
            }
        }
        if (cache.size() > 64)
            cache.clear();
        cache.emplace(key, w);
        return w;
    }

    // Rayleigh scale from the median magnitude of complex Gaussian samples.
    inline double rayleigh_floor(const cvec &y)
    {
        if (y.empty())
            return 0.0;
        rvec a(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            a[i] = std::abs(y[i]);
        auto mid = a.begin() + std::ptrdiff_t(a.size() / 2);
        std::nth_element(a.begin(), mid, a.end());
        return *mid / std::sqrt(std::log(2.0));
    }

    inline std::vector<std::size_t> initial_peak_select(const Signal &y, double zeta1)
    {
        require_domain(y, Domain::Affine, "initial_peak_select");
        std::vector<std::size_t> idx;
        for (std::size_t m = 0; m < y.size(); ++m)
            if (std::abs(y[m]) >= zeta1 && y[m] != 0.0)
                idx.push_back(m);
        return idx;
    }

    namespace detail
    {
        // Max-combined Kaiser windows centred on each peak, restricted to [lo, hi). The window
        // falls off monotonically from its centre, so only the nearest peak on each side matters.
        inline rvec window_mask(const std::vector<std::size_t> &peaks, const rvec &w, std::size_t N, std::size_t lo,
                                std::size_t hi)
        {
            rvec g(N, 0.0);
            if (peaks.empty())
                return g;
            const std::size_t span = w.size();
            const std::int64_t c = std::int64_t(span / 2), last = std::int64_t(span) - 1;
            auto tap = [&](std::int64_t m, std::int64_t p) {
                const std::int64_t i = m - p + c;
                return i < 0 || i > last ? 0.0 : w[std::size_t(i)];
            };
            std::size_t k = 0; // first peak >= m
            for (std::size_t m = lo; m < hi; ++m)
            {
                while (k < peaks.size() && peaks[k] < m)
                    ++k;
                double v = 0.0;
                if (k < peaks.size())
                    v = tap(std::int64_t(m), std::int64_t(peaks[k]));
                if (k > 0)
                    v = std::max(v, tap(std::int64_t(m), std::int64_t(peaks[k - 1])));
                g[m] = v;
            }
            return g;
        }

        inline std::pair<std::size_t, std::size_t> locked_span(const std::vector<std::size_t> &peaks, std::size_t n_w,
                                                               std::size_t N)
        {
            std::int64_t lo = std::int64_t(peaks.front()) - std::int64_t(n_w / 2);
            std::int64_t hi = std::int64_t(peaks.back()) + std::int64_t(n_w / 2) + 1;
            return {std::size_t(std::max<std::int64_t>(lo, 0)), std::size_t(std::min<std::int64_t>(hi, std::int64_t(N)))};
        }
    }

    // Iterative windowing over the post-subtraction affine signal. n_r_tot sets the default spans.
    inline SicResult iterative_windowing(const Signal &y, const SicConfig &cfg, std::size_t n_r_tot)
    {
        require_domain(y, Domain::Affine, "iterative_windowing");
        cfg.validate();
        const std::size_t N = y.size();
        const std::size_t n_w = cfg.n_w ? cfg.n_w : 2 * n_r_tot;
        const std::size_t n_w_iter = cfg.n_w_iter ? cfg.n_w_iter : n_r_tot;
        double scale = 1.0;
        if (cfg.scale == ThresholdScale::Floor)
            scale = rayleigh_floor(y.samples);
        else if (cfg.scale == ThresholdScale::Peak)
        {
            scale = 0.0;
            for (const auto &v : y.samples)
                scale = std::max(scale, std::abs(v));
        }

        SicResult res;
        res.n_obs = N;
        res.gain.assign(N, 0.0);
        auto peaks = initial_peak_select(y, cfg.zeta(1) * scale);
        if (peaks.empty())
            return res;

        auto [lo, hi] = detail::locked_span(peaks, n_w, N);
        res.m_lo = lo;
        res.m_hi = hi;
        res.peak_indices.push_back(peaks);
        res.iterations_used = 1;

        rvec gain = detail::window_mask(peaks, kaiser_window(n_w, cfg.kaiser_beta), N, lo, hi);
        const rvec w_iter = kaiser_window(n_w_iter, cfg.kaiser_beta);
        cvec cur(N, 0.0);
        for (std::size_t m = lo; m < hi; ++m)
            cur[m] = y[m] * gain[m];

        res.converged = false;
        for (std::size_t u = 2; u <= cfg.rho_max; ++u)
        {
            if (!cfg.threshold_schedule.empty() && u > cfg.threshold_schedule.size())
                break;
            const double z = cfg.zeta(u) * scale;
            std::vector<std::size_t> pk;
            for (std::size_t m = lo; m < hi; ++m)
                if (cur[m] != 0.0 && std::abs(cur[m]) >= z)
                    pk.push_back(m);
            res.peak_indices.push_back(pk);
            res.iterations_used = u;
            if (pk.size() == res.peak_indices[u - 2].size())
            {
                res.converged = true;
                break;
            }
            rvec g = detail::window_mask(pk, w_iter, N, lo, hi);
            for (std::size_t m = lo; m < hi; ++m)
            {
                cur[m] *= g[m];
                gain[m] *= g[m];
            }
        }
        if (cfg.rho_max == 1)
            res.converged = true;

        res.gain = gain;
        res.n_s = hi - lo;
        res.cleaned = Signal(cvec(cur.begin() + std::ptrdiff_t(lo), cur.begin() + std::ptrdiff_t(hi)), Domain::Affine);
        return res;
    }

    // Analytic residual injection: the locked span comes from the echo alone and the disturbance
    // is scaled by eps_rho without touching the echo.
    inline SicResult analytic_windowing(const Signal &echo, const Signal &disturbance, const SicConfig &cfg,
                                        std::size_t n_r_tot)
    {
        require_domain(echo, Domain::Affine, "analytic_windowing");
        require_domain(disturbance, Domain::Affine, "analytic_windowing");
        SicResult res = iterative_windowing(echo, cfg, n_r_tot);
        if (res.iterations_used == 0)
            return res;
        const double er = cfg.eps_rho();
        cvec c(res.n_s);
        std::fill(res.gain.begin(), res.gain.end(), 0.0);
        for (std::size_t i = 0; i < res.n_s; ++i)
        {
            c[i] = echo[res.m_lo + i] + er * disturbance[res.m_lo + i];
            res.gain[res.m_lo + i] = 1.0;
        }
        res.cleaned = Signal(std::move(c), Domain::Affine);
        return res;
    }

    inline Signal to_time(const SicResult &res, const DaftParams &p)
    {
        if (p.n != res.n_s)
            throw DimensionError("to_time: DAFT size must equal the locked span length");
        if (res.n_s == 0)
            return Signal(cvec{}, Domain::Time);
        return idaft(res.cleaned, p);
    }

    // Locked span re-inserted into the full observation window.
    inline Signal restore_observation(const SicResult &res)
    {
        cvec full(res.n_obs, 0.0);
        for (std::size_t i = 0; i < res.n_s; ++i)
            full[res.m_lo + i] = res.cleaned[i];
        return Signal(std::move(full), Domain::Affine);
    }
}
