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
#include <limits>
#include <numeric>
#include <optional>

#include "pctd.hpp"

namespace afisac
{
    // Per-PRI link budget. Noise enters as a power (N0 * B) beside per-symbol
    // energies, which mixes dimensions but reproduces the published curves.
    struct LinkBudget
    {
        double p_r = 1.0;
        double p_c = 1.0;
        double eps = 1.0;
        double eps_rho = 1.0;
        double n0_w = 1.0;       // N0 * B in watts
        double path_terms = 1.0; // sum of |alpha_i|^2
        double n_s = 1.0;
        double n_r = 1.0;
        double n_c = 1.0;

        void validate() const
        {
            if (!(p_r > 0.0) || !(p_c > 0.0) || !(n0_w > 0.0))
                throw ConfigError("link budget: powers must be positive");
            if (!(eps > 0.0 && eps <= 1.0) || !(eps_rho > 0.0 && eps_rho <= 1.0))
                throw ConfigError("link budget: eps and eps_rho must lie in (0, 1]");
            if (path_terms < 0.0 || n_s <= 0.0 || n_r <= 0.0 || n_c <= 0.0)
                throw ConfigError("link budget: counts must be positive");
        }
    };

    struct SinrTerms
    {
        double radar = 0.0;
        double si = 0.0;
        double noise = 0.0;
        double sinr = 0.0;
    };

    inline SinrTerms sinr_terms(const LinkBudget &b)
    {
        b.validate();
        SinrTerms t;
        const double k = b.eps_rho * b.eps_rho;
        t.radar = b.path_terms * b.n_s * b.n_r * b.p_r;
        t.si = k * b.eps * b.eps * b.n_s * b.n_c * b.p_c;
        t.noise = k * b.n0_w;
        t.sinr = t.radar / (t.si + t.noise);
        return t;
    }

    inline double sinr(const LinkBudget &b) { return sinr_terms(b).sinr; }

    // First-order Marcum Q as a Poisson mixture:
    //   Q1(a, b) = sum_k Pois(k; a^2/2) * P(Pois(b^2/2) <= k).
    // The sum runs over a Chernoff window around the mode of the first Poisson.
    inline double marcum_q1(double a, double b, double tol = 1e-10)
    {
        if (!(a >= 0.0) || !(b >= 0.0))
            throw ConfigError("marcum_q1: arguments must be non-negative");
        const double lam = 0.5 * a * a, mu = 0.5 * b * b;
        if (mu == 0.0)
            return 1.0;
        if (lam == 0.0)
            return std::exp(-mu);

        // log of the Chernoff tail bound P(X >= k) or P(X <= k) for X ~ Pois(lam)
        auto log_tail = [lam](double k) { return -lam + k - k * std::log(k / lam); };
        const double lt = std::log(0.25 * tol);
        std::size_t k_lo = 0;
        if (lam > 1.0)
        {
            double k = std::floor(lam);
            while (k > 0.0 && log_tail(k) > lt)
                k -= 1.0;
            k_lo = std::size_t(k);
        }

        // P(Pois(mu) <= k_lo) via log-space accumulation.
        const double lmu = std::log(mu);
        auto log_pmf = [](double k, double m, double lm) { return -m + k * lm - std::lgamma(k + 1.0); };
        double cdf = 0.0;
        for (std::size_t i = 0; i <= k_lo; ++i)
            cdf += std::exp(log_pmf(double(i), mu, lmu));

        const double llam = std::log(lam);
        const std::size_t cap = 10'000'000;
        double sum = 0.0, weight = 0.0;
        for (std::size_t k = k_lo;; ++k)
        {
            if (k > k_lo)
                cdf += std::exp(log_pmf(double(k), mu, lmu));
            const double w = std::exp(log_pmf(double(k), lam, llam));
            sum += w * std::min(cdf, 1.0);
            weight += w;
            const double kk = double(k + 1);
            if (kk > lam && log_tail(kk) < lt)
                break;
            if (k - k_lo > cap)
                throw NumericError("marcum_q1: series did not converge");
        }
        if (!(std::abs(weight - 1.0) < 1e-6) || !std::isfinite(sum))
            throw NumericError("marcum_q1: lost Poisson mass");
        return std::clamp(sum, 0.0, 1.0);
    }

    inline double pd_analytic(double sinr_lin, double p_fa)
    {
        if (!(p_fa > 0.0 && p_fa < 1.0))
            throw ConfigError("pd_analytic: p_fa must lie in (0, 1)");
        if (sinr_lin < 0.0)
            throw ConfigError("pd_analytic: sinr must be non-negative");
        return marcum_q1(std::sqrt(2.0 * sinr_lin), std::sqrt(-2.0 * std::log(p_fa)));
    }

    struct SeBreakdown
    {
        std::int64_t n_r_eff = 0;
        std::int64_t n_c_eff = 0;
        std::int64_t n_tot = 0;
        std::int64_t m_conv = 0;   // OFDM symbols filling the PRI in the unified design
        std::int64_t conv_eff = 0;
        std::int64_t conv_tot = 0;
        double eta = 0.0;
        double eta_conv = 0.0;
    };

    // guard count G_r is per pilot, as in the efficiency expression.
    inline SeBreakdown se_breakdown(const FrameConfig &cfg, const PilotLayout &layout, std::size_t n_c_pilots,
                                    double sinr_lin)
    {
        if (sinr_lin < 0.0)
            throw ConfigError("spectral_efficiency: sinr must be non-negative");
        const auto d = frame_dims(cfg);
        const auto &a = cfg.afdm;
        const auto &o = cfg.ofdm;
        SeBreakdown s;
        s.n_tot = std::int64_t(d.n_tot);
        s.n_r_eff = std::int64_t(d.n_r_tot) -
                    std::int64_t(a.m_r) * std::int64_t(layout.n_pilots * (1 + layout.guard_size) + a.l_cpp);
        s.n_c_eff = std::int64_t(d.n_c_tot) - std::int64_t(o.m_c) * std::int64_t(n_c_pilots + o.l_cp);
        if (s.n_r_eff < 0 || s.n_c_eff < 0)
            throw ConfigError("spectral_efficiency: negative effective sample count");
        const double lg = std::log2(1.0 + sinr_lin);
        s.eta = double(s.n_r_eff + s.n_c_eff) / double(s.n_tot) * lg;

        s.m_conv = s.n_tot / std::int64_t(o.n_c + o.l_cp);
        s.conv_eff = s.m_conv * std::int64_t(o.n_c - n_c_pilots);
        s.conv_tot = s.m_conv * std::int64_t(o.n_c + o.l_cp);
        s.eta_conv = s.conv_tot > 0 ? double(s.conv_eff) / double(s.conv_tot) * lg : 0.0;
        return s;
    }

    inline double spectral_efficiency(const FrameConfig &cfg, const PilotLayout &layout, std::size_t n_c_pilots,
                                      double sinr_lin)
    {
        return se_breakdown(cfg, layout, n_c_pilots, sinr_lin).eta;
    }

    struct ComplexityRecord
    {
        double o1 = 0.0; // affine projection
        double o2 = 0.0; // windowing
        double o3 = 0.0; // time and PCTD processing
        double total = 0.0;
        std::size_t n_cg = 0, n_w = 0, n_r_tot = 0, n_s = 0, n_zp = 0;
        std::vector<std::size_t> q;
    };

    inline double nlog2n(double n) { return n > 0.0 ? n * std::log2(n) : 0.0; }

    // q[u-1] is the number of peaks kept at iteration u.
    inline ComplexityRecord complexity_terms(std::size_t n_cg, std::size_t n_w, std::size_t n_r_tot,
                                             const std::vector<std::size_t> &q, std::size_t n_s, std::size_t n_zp)
    {
        ComplexityRecord c;
        c.n_cg = n_cg;
        c.n_w = n_w;
        c.n_r_tot = n_r_tot;
        c.n_s = n_s;
        c.n_zp = n_zp;
        c.q = q;
        c.o1 = nlog2n(double(n_cg));
        if (!q.empty())
        {
            c.o2 = double(n_w) * double(q[0]);
            double rest = 0.0;
            for (std::size_t u = 1; u < q.size(); ++u)
                rest += double(q[u]);
            c.o2 += double(n_r_tot) * rest;
        }
        c.o3 = 2.0 * nlog2n(double(n_s)) + 2.0 * nlog2n(double(n_zp));
        c.total = c.o1 + c.o2 + c.o3;
        return c;
    }

    inline ComplexityRecord complexity_estimate(const FrameConfig &cfg, const SicConfig &sic, const SicResult &res,
                                                std::size_t z_p)
    {
        const auto d = frame_dims(cfg);
        std::vector<std::size_t> q;
        for (const auto &p : res.peak_indices)
            q.push_back(p.size());
        const std::size_t n_w = sic.n_w ? sic.n_w : 2 * d.n_r_tot;
        const std::size_t n_zp = z_p * pctd_side(std::max<std::size_t>(res.n_s, 1));
        return complexity_terms(d.n_c_tot + 2 * cfg.n_g, n_w, d.n_r_tot, q, res.n_s, n_zp);
    }

    struct EstimatePoint
    {
        double range_m = 0.0;
        double velocity_mps = 0.0;
    };

    struct RmseReport
    {
        double range_rmse_m = 0.0;         // mean of per-target absolute errors, as defined
        double velocity_rmse_mps = 0.0;
        double range_rmse_conv_m = 0.0;    // conventional root mean square
        double velocity_rmse_conv_mps = 0.0;
        std::size_t associated = 0;
        std::size_t misses = 0;
    };

    // estimates[i] pairs with truths[i]; an empty optional is a miss.
    inline RmseReport rmse(const std::vector<std::optional<EstimatePoint>> &estimates,
                           const std::vector<EstimatePoint> &truths)
    {
        if (estimates.size() != truths.size())
            throw DimensionError("rmse: estimates and truths differ in length");
        RmseReport r;
        double ar = 0.0, av = 0.0, sr = 0.0, sv = 0.0;
        for (std::size_t i = 0; i < truths.size(); ++i)
        {
            if (!estimates[i])
            {
                ++r.misses;
                continue;
            }
            const double er = estimates[i]->range_m - truths[i].range_m;
            const double ev = estimates[i]->velocity_mps - truths[i].velocity_mps;
            ar += std::abs(er);
            av += std::abs(ev);
            sr += er * er;
            sv += ev * ev;
            ++r.associated;
        }
        if (r.associated > 0)
        {
            const double n = double(r.associated);
            r.range_rmse_m = ar / n;
            r.velocity_rmse_mps = av / n;
            r.range_rmse_conv_m = std::sqrt(sr / n);
            r.velocity_rmse_conv_mps = std::sqrt(sv / n);
        }
        return r;
    }

    // Greedy nearest-neighbour association in gate-normalised distance.
    // Returns the detection index per truth, -1 when nothing falls inside the gates.
    inline std::vector<int> associate(const std::vector<Detection> &dets, const std::vector<EstimatePoint> &truths,
                                      double range_gate_m, double velocity_gate_mps)
    {
        std::vector<int> out(truths.size(), -1);
        std::vector<bool> used(dets.size(), false);
        struct Cand
        {
            double d;
            std::size_t t, k;
        };
        std::vector<Cand> cands;
        for (std::size_t t = 0; t < truths.size(); ++t)
            for (std::size_t k = 0; k < dets.size(); ++k)
            {
                const double dr = (dets[k].range_m - truths[t].range_m) / range_gate_m;
                const double dv = (dets[k].velocity_mps - truths[t].velocity_mps) / velocity_gate_mps;
                if (std::abs(dr) <= 1.0 && std::abs(dv) <= 1.0)
                    cands.push_back({dr * dr + dv * dv, t, k});
            }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) { return a.d < b.d; });
        for (const auto &c : cands)
            if (out[c.t] < 0 && !used[c.k])
            {
                out[c.t] = int(c.k);
                used[c.k] = true;
            }
        return out;
    }

    struct StatReport
    {
        double mean_abs = 0.0;       // largest |mean| over bins
        double max_mean_z = 0.0;     // largest |mean| / standard error
        double variance_uniformity = 0.0;
        double offdiag_ratio = 0.0;  // mean off-diagonal |C_ij|^2 over mean diagonal |C_ii|^2
        std::size_t trials = 0;
        bool mean_pass = false;
        bool uniformity_pass = false;
        bool offdiag_pass = false;

        bool pass() const { return mean_pass && uniformity_pass && offdiag_pass; }
    };

    struct WhitenessThresholds
    {
        double mean_z = 5.0;
        double uniformity = 1.5;
        double offdiag = 0.05;
    };

    // realization(t) returns the t-th independent time-domain draw.
    template <class Gen>
    StatReport affine_whiteness_report(Gen &&realization, const DaftParams &p, std::size_t trials,
                                       const WhitenessThresholds &th = {})
    {
        if (trials < 100)
            throw ConfigError("affine_whiteness_report: at least 100 trials required");
        const std::size_t N = p.n;
        CMatrix Y(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(trials));
        for (std::size_t t = 0; t < trials; ++t)
        {
            const Signal x = realization(t);
            require_domain(x, Domain::Time, "affine_whiteness_report");
            if (x.size() != N)
                throw DimensionError("affine_whiteness_report: realization length differs from N");
            const cvec y = daft(x.samples, p);
            for (std::size_t m = 0; m < N; ++m)
                Y(Eigen::Index(m), Eigen::Index(t)) = y[m];
        }
        const double T = double(trials);
        Eigen::VectorXcd mu = Y.rowwise().mean();
        Y.colwise() -= mu;
        const CMatrix C = (Y * Y.adjoint()) / T;

        StatReport r;
        r.trials = trials;
        double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0, diag = 0.0, off = 0.0;
        for (std::size_t m = 0; m < N; ++m)
        {
            const Eigen::Index i = Eigen::Index(m);
            const double v = C(i, i).real();
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            r.mean_abs = std::max(r.mean_abs, std::abs(mu(i)));
            const double se = std::sqrt(std::max(v, 1e-300) / T);
            r.max_mean_z = std::max(r.max_mean_z, std::abs(mu(i)) / se);
            diag += v * v;
        }
        off = C.cwiseAbs2().sum() - diag;
        r.variance_uniformity = vmin > 0.0 ? vmax / vmin : std::numeric_limits<double>::infinity();
        const double nd = double(N);
        r.offdiag_ratio = N > 1 ? (off / (nd * (nd - 1.0))) / (diag / nd) : 0.0;
        r.mean_pass = r.max_mean_z < th.mean_z;
        r.uniformity_pass = r.variance_uniformity < th.uniformity;
        r.offdiag_pass = r.offdiag_ratio < th.offdiag;
        return r;
    }

    inline StatReport affine_whiteness_report(const std::vector<Signal> &draws, const DaftParams &p,
                                              const WhitenessThresholds &th = {})
    {
        return affine_whiteness_report([&](std::size_t t) { return draws[t]; }, p, draws.size(), th);
    }

    struct MannKendall
    {
        double s = 0.0;
        double z = 0.0;
        double p_increasing = 1.0; // one-sided p-value against an upward trend
        double p_decreasing = 1.0;
        bool exact = false;
    };

    inline double mk_statistic(const std::vector<double> &x)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = i + 1; j < x.size(); ++j)
                s += double((x[j] > x[i]) - (x[j] < x[i]));
        return s;
    }

    // Exact permutation distribution for n <= 8, tie-corrected normal approximation above.
    inline MannKendall mann_kendall(const std::vector<double> &x)
    {
        MannKendall r;
        const std::size_t n = x.size();
        if (n < 3)
            throw ConfigError("mann_kendall: at least 3 points required");
        r.s = mk_statistic(x);
        if (n <= 8)
        {
            r.exact = true;
            std::vector<double> v = x;
            std::sort(v.begin(), v.end());
            std::size_t total = 0, ge = 0, le = 0;
            do
            {
                const double s = mk_statistic(v);
                ++total;
                ge += s >= r.s;
                le += s <= r.s;
            } while (std::next_permutation(v.begin(), v.end()));
            // next_permutation visits distinct arrangements; each is equally likely under H0.
            r.p_increasing = double(ge) / double(total);
            r.p_decreasing = double(le) / double(total);
            return r;
        }
        std::vector<double> v = x;
        std::sort(v.begin(), v.end());
        double var = double(n) * (n - 1.0) * (2.0 * n + 5.0);
        for (std::size_t i = 0; i < n;)
        {
            std::size_t j = i;
            while (j < n && v[j] == v[i])
                ++j;
            const double t = double(j - i);
            var -= t * (t - 1.0) * (2.0 * t + 5.0);
            i = j;
        }
        var /= 18.0;
        if (var <= 0.0)
        {
            r.z = 0.0;
            return r;
        }
        const double sd = std::sqrt(var);
        r.z = r.s > 0 ? (r.s - 1.0) / sd : (r.s < 0 ? (r.s + 1.0) / sd : 0.0);
        r.p_increasing = 0.5 * std::erfc(r.z / std::sqrt(2.0));
        r.p_decreasing = 0.5 * std::erfc(-r.z / std::sqrt(2.0));
        return r;
    }
}
