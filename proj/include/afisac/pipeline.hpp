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

#include <chrono>

#include "metrics.hpp"

namespace afisac
{
    struct PipelineConfig
    {
        FrameConfig frame;
        ChannelConfig channel;
        SicConfig sic;
        PctdConfig pctd;
        bool cancel = true;              // false runs the raw receiver with no SI processing
        double assoc_range_gates = 3.0;  // association gate in range cells
        double assoc_doppler_bins = 2.0; // association gate in slow-time resolution cells

        void validate() const
        {
            frame.validate();
            sic.validate();
            pctd.validate();
            const FrameDims d = frame_dims(frame);
            DaftParams(d.n_obs, frame.afdm.c1, frame.afdm.c2).validate();
            if (pctd.gates + frame.afdm.n_r > d.n_obs)
                throw ConfigError("pctd: gates exceed the observation window");
            if (!(assoc_range_gates > 0.0) || !(assoc_doppler_bins > 0.0))
                throw ConfigError("association gates must be positive");
        }
    };

    // DAFT over the whole observation window with the radar chirp rates.
    inline DaftParams observation_params(const FrameConfig &cfg)
    {
        return DaftParams(frame_dims(cfg).n_obs, cfg.afdm.c1, cfg.afdm.c2);
    }

    inline std::vector<cvec> reference_symbols(const PriFrame &f, const AfdmConfig &afdm)
    {
        std::vector<cvec> refs;
        refs.reserve(f.radar_payload.size());
        for (const auto &x : f.radar_payload)
            refs.push_back(gen_afdm_symbol(x, afdm).samples);
        return refs;
    }

    inline std::vector<EstimatePoint> truth_points(const ChannelConfig &ch)
    {
        std::vector<EstimatePoint> t;
        for (const auto &g : ch.targets)
            t.push_back({g.range_m, g.velocity_mps});
        return t;
    }

    // Closed-form SINR inputs for a configuration and a locked span of n_s samples. Returns
    // nothing when a term is zero and the ratio is undefined.
    inline std::optional<LinkBudget> link_budget(const PipelineConfig &pc, double n_s)
    {
        const FrameConfig &f = pc.frame;
        LinkBudget b;
        b.p_r = f.afdm.pilot_layout.pilot_power;
        b.p_c = 1.0;
        b.eps = pc.sic.epsilon;
        b.eps_rho = pc.sic.eps_rho();
        b.n0_w = noise_variance(pc.channel, f.bandwidth_hz);
        b.path_terms = 0.0;
        for (const auto &t : pc.channel.targets)
            b.path_terms += std::norm(target_to_bins(t, f, pc.channel).alpha);
        b.n_s = n_s;
        b.n_r = double(f.afdm.n_r);
        b.n_c = double(f.ofdm.n_c);
        if (!(b.eps > 0.0) || !(b.eps_rho <= 1.0) || !(b.n0_w > 0.0) || !(b.p_r > 0.0) || !(n_s > 0.0))
            return std::nullopt;
        return b;
    }

    // Standard deviation of a Doppler-matrix cell driven by receiver noise alone, without SIC:
    // sigma^2 = N0 B / N_zp * sum_p taper_p^2 / e_p.
    inline double thermal_cell_sigma(const PipelineConfig &pc, const std::vector<cvec> &refs)
    {
        const std::size_t M = refs.size(), G = pc.pctd.gates;
        const std::size_t K = pctd_side(std::max(M, G) * std::max(M, G));
        const rvec taper = slow_time_taper(M, pc.pctd.slow_time_beta);
        double s = 0.0;
        for (std::size_t p = 0; p < M; ++p)
            if (const double e = energy(refs[p]); e > 0.0)
                s += taper[p] * taper[p] / e;
        return std::sqrt(noise_variance(pc.channel, pc.frame.bandwidth_hz) * s / double(pc.pctd.z_p * K));
    }

    struct TrialOutput
    {
        RangeDopplerMap map;
        Estimate est;
        SicResult sic;
        std::vector<TargetBins> bins;
        std::vector<EstimatePoint> truths;
        PriFrame frame;
        double seconds = 0.0;
    };

    // Residual scaling after SI subtraction: the input to the windowing stage.
    inline SicResult cancel_si(const RxComponents &rx, const PipelineConfig &pc, const DaftParams &p)
    {
        const FrameDims d = frame_dims(pc.frame);
        const Signal y0 = project_affine(rx.total(), p);
        const Signal y = subtract_si(y0, Signal(rx.replica, Domain::Time), pc.channel.si.beta, pc.sic.epsilon, p);
        if (pc.sic.mode == ResidualMode::Measured)
            return iterative_windowing(y, pc.sic, d.n_r_tot);
        const Signal echo = project_affine(Signal(rx.echo, Domain::Time), p);
        cvec dist(y.size());
        for (std::size_t m = 0; m < dist.size(); ++m)
            dist[m] = y[m] - echo[m];
        return analytic_windowing(echo, Signal(std::move(dist), Domain::Affine), pc.sic, d.n_r_tot);
    }

    // One PRI: assemble, propagate, cancel, post-code, PCTD, detect, associate.
    inline TrialOutput run_trial(const PipelineConfig &pc, std::uint64_t seed)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const FrameDims d = frame_dims(pc.frame);
        const DaftParams p = observation_params(pc.frame);
        Rng rng(seed);
        PriFrame prev = assemble_pri(pc.frame, rng);
        TrialOutput out;
        out.frame = assemble_pri(pc.frame, rng);
        RxComponents rx = simulate_rx_components(out.frame, prev, pc.channel, pc.frame, rng);
        out.bins = rx.bins;

        Signal r_t;
        if (pc.cancel)
        {
            out.sic = cancel_si(rx, pc, p);
            r_t = idaft(restore_observation(out.sic), p);
        }
        else
        {
            r_t = rx.total();
            out.sic.n_obs = out.sic.n_s = d.n_obs;
            out.sic.m_hi = d.n_obs;
        }

        const auto refs = reference_symbols(out.frame, pc.frame.afdm);
        const Signal h = post_code(r_t, refs, pc.frame.afdm, pc.pctd);
        out.map = build_rdm(h, pc.frame.afdm.m_r, pc.pctd.gates, pc.frame, pc.pctd);
        if (pc.pctd.floor_mode == FloorMode::Thermal && !pc.pctd.noise_sigma)
            out.est = detect(out.map, pc.pctd, rvec(out.map.gates, thermal_cell_sigma(pc, refs)));
        else
            out.est = detect(out.map, pc.pctd);
        out.truths = truth_points(pc.channel);
        const double vgate = pc.assoc_doppler_bins * std::abs(out.map.velocity_per_cycle_mps) / double(pc.frame.afdm.m_r);
        out.est.truth_assoc =
            associate(out.est.detections, out.truths, pc.assoc_range_gates * out.map.range_per_gate_m, vgate);
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    inline std::vector<std::optional<EstimatePoint>> associated_points(const TrialOutput &t)
    {
        std::vector<std::optional<EstimatePoint>> v(t.truths.size());
        for (std::size_t i = 0; i < t.truths.size(); ++i)
            if (i < t.est.truth_assoc.size() && t.est.truth_assoc[i] >= 0)
            {
                const auto &det = t.est.detections[std::size_t(t.est.truth_assoc[i])];
                v[i] = EstimatePoint{det.range_m, det.velocity_mps};
            }
        return v;
    }

    struct CellStatistics
    {
        cplx mean = 0.0;
        double sigma = 0.0; // sqrt(E|cell - mean|^2)
        double sinr = 0.0;  // |mean|^2 / sigma^2
        double var_noise = 0.0;
        double var_comm = 0.0;
    };

    inline double alphabet_power(const ModAlphabet &a)
    {
        double s = 0.0;
        for (int i = 0; i < a.order; ++i)
            s += std::norm(qam_symbol(a.order, std::uint64_t(i), a.unit_power));
        return s / double(a.order);
    }

    // Exact first and second moments of one Doppler-matrix cell given the locked span.
    // Everything between the channel and the cell is linear once the span and gains are fixed,
    // so the cell is an inner product with the received samples. Random terms are the receiver
    // noise and the OFDM data of both frames (reaching the cell through SI and through the echo).
    inline CellStatistics cell_statistics(const PipelineConfig &pc, const PriFrame &cur, const PriFrame &prev,
                                          const SicResult &sic, std::size_t row, std::size_t gate)
    {
        const FrameConfig &fc = pc.frame;
        const FrameDims d = frame_dims(fc);
        const DaftParams p = observation_params(fc);
        const std::size_t N = d.n_obs;
        if (fc.afdm.pilot_layout.data_fill)
            throw ConfigError("cell_statistics: radar symbols must be pilot-only");
        if (!pc.cancel)
            throw ConfigError("cell_statistics: defined for the cancelling receiver");

        // Time-domain weights of the post-coding and Doppler IDFT stages.
        const auto refs = reference_symbols(cur, fc.afdm);
        const std::size_t M = refs.size(), Nr = fc.afdm.n_r, L = fc.afdm.l_cpp;
        const std::size_t K = pctd_side(std::max(M, pc.pctd.gates) * std::max(M, pc.pctd.gates));
        const double nzp = double(pc.pctd.z_p * K);
        const rvec taper = slow_time_taper(M, pc.pctd.slow_time_beta);
        cvec a(N, 0.0);
        for (std::size_t q = 0; q < M; ++q)
        {
            const double e = energy(refs[q]);
            if (e == 0.0)
                continue;
            const cplx w = taper[q] / e / std::sqrt(nzp) *
                           std::polar(1.0, 2.0 * pi * double((q * row) % std::size_t(nzp)) / nzp);
            const std::size_t start = q * (Nr + L) + L + gate;
            for (std::size_t n = 0; n < Nr; ++n)
                a[(start + n) % N] += w * std::conj(refs[q][n]);
        }

        // cell = a^T idaft(g .* y) = b^T y with b = g .* conj(daft(conj a)).
        cvec ac(N);
        for (std::size_t n = 0; n < N; ++n)
            ac[n] = std::conj(a[n]);
        cvec b = daft(ac, p);
        for (std::size_t m = 0; m < N; ++m)
        {
            const bool in = m >= sic.m_lo && m < sic.m_hi;
            const double g = !in ? 0.0 : pc.sic.mode == ResidualMode::Analytic ? 1.0 : sic.gain[m];
            b[m] = g * std::conj(b[m]);
        }
        // b^T y with y = daft(x) equals c^T x with c = conj(idaft(conj b)).
        cvec bc(N);
        for (std::size_t m = 0; m < N; ++m)
            bc[m] = std::conj(b[m]);
        cvec c = idaft(bc, p);
        for (auto &v : c)
            v = std::conj(v);

        const double k_dist = pc.sic.mode == ResidualMode::Analytic ? pc.sic.eps_rho() : 1.0;
        CellStatistics st;
        st.var_noise = k_dist * k_dist * noise_variance(pc.channel, fc.bandwidth_hz) * energy(c);

        // Coefficients on the transmitted samples of both frames.
        cvec coef_cur(d.n_tot, 0.0), coef_prev(d.n_tot, 0.0);
        const auto &si = pc.channel.si;
        const cplx resid = si.beta - (1.0 - pc.sic.epsilon) * si.beta;
        for (std::size_t j = 0; j < N; ++j)
            coef_cur[d.n_r_tot + j] += k_dist * resid * c[j];
        for (const auto &[delay, gain] : si.taps)
            for (std::size_t j = 0; j + delay < N; ++j)
                coef_cur[d.n_r_tot + j] += k_dist * gain * c[j + delay];

        for (const auto &t : pc.channel.targets)
        {
            const TargetBins tb = target_to_bins(t, fc, pc.channel);
            if (tb.l != std::floor(tb.l))
                throw ConfigError("cell_statistics: integer target delay required");
            const std::size_t li = std::size_t(tb.l);
            const double nr = double(Nr);
            const cplx a_hat = tb.alpha * std::polar(1.0, -2.0 * pi * tb.kappa * tb.l / nr);
            for (std::size_t n = 0; n < N; ++n)
            {
                double ph = tb.kappa * double(n) / nr;
                ph -= std::floor(ph);
                const cplx w = c[n] * a_hat * std::polar(1.0, -2.0 * pi * ph);
                const std::size_t k = (n + N - li) % N;
                if (k < N - li)
                    coef_cur[k] += w;
                else
                    coef_prev[d.n_tot - (N - k)] += w;
            }
        }

        // Radar samples are deterministic; OFDM samples carry independent unit-variance symbols.
        for (std::size_t t = 0; t < d.n_r_tot; ++t)
            st.mean += coef_cur[t] * cur.samples[t] + coef_prev[t] * prev.samples[t];
        const auto &o = fc.ofdm;
        const double ps = alphabet_power(o.alphabet);
        const std::size_t base = d.n_r_tot + fc.n_g, sym = o.n_c + o.l_cp;
        cvec fold(o.n_c);
        for (const cvec *coef : {&coef_cur, &coef_prev})
            for (std::size_t q = 0; q < o.m_c; ++q)
            {
                std::fill(fold.begin(), fold.end(), 0.0);
                for (std::size_t i = 0; i < sym; ++i)
                    fold[(i + o.n_c - o.l_cp) % o.n_c] += (*coef)[base + q * sym + i];
                st.var_comm += ps * energy(fold);
            }
        const double var = st.var_noise + st.var_comm;
        st.sigma = std::sqrt(var);
        st.sinr = var > 0.0 ? std::norm(st.mean) / var : std::numeric_limits<double>::infinity();
        return st;
    }

    inline cplx map_cell(const RangeDopplerMap &m, std::size_t row, std::size_t gate)
    {
        return m.doppler_matrix(Eigen::Index(row), Eigen::Index(gate));
    }
}
