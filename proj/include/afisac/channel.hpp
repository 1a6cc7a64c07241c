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

#include <cmath>
#include <optional>
#include <utility>

#include "frame.hpp"

namespace afisac
{
    struct Target
    {
        double range_m = 0.0;
        double velocity_mps = 0.0;
        double rcs_m2 = 1.0;
        std::optional<cplx> amplitude_override;
    };

    struct SiPath
    {
        cplx beta = 0.0;
        std::vector<std::pair<std::size_t, cplx>> taps; // extra (delay bins, gain) beyond the direct leak
    };

    struct ChannelConfig
    {
        std::vector<Target> targets;
        SiPath si;
        double noise_psd_dbm_hz = -174.0;
        bool noise_enabled = true;
        std::optional<double> noise_variance_override; // replaces N0*B when set
        double g_t_dbi = 18.0;
        double g_r_dbi = 18.0;
        std::uint64_t rng_seed = 1;
    };

    inline double noise_variance(const ChannelConfig &ch, double bandwidth_hz)
    {
        if (!ch.noise_enabled)
            return 0.0;
        if (ch.noise_variance_override)
            return *ch.noise_variance_override;
        return db_to_lin(ch.noise_psd_dbm_hz - 30.0) * bandwidth_hz;
    }

    struct TargetBins
    {
        double l = 0.0;     // delay in samples
        double kappa = 0.0; // Doppler normalized to 1/T_r
        cplx alpha = 0.0;   // echo amplitude before the exp(-j 2 pi nu tau) rotation
    };

    // Radar-equation power gain G_t G_r lambda^2 sigma / ((4 pi)^3 R^4).
    inline double radar_power_gain(double range_m, double rcs_m2, double carrier_hz, double g_t_dbi, double g_r_dbi)
    {
        const double lambda = speed_of_light / carrier_hz;
        const double gt = db_to_lin(g_t_dbi), gr = db_to_lin(g_r_dbi);
        return gt * gr * lambda * lambda * rcs_m2 / (std::pow(4.0 * pi, 3) * std::pow(range_m, 4));
    }

    inline TargetBins target_to_bins(const Target &t, const FrameConfig &cfg, const ChannelConfig &ch = {})
    {
        const FrameDims d = frame_dims(cfg);
        if (t.range_m < 0.0)
            throw ConfigError("target range must be non-negative");
        const double tau = 2.0 * t.range_m / speed_of_light;
        if (tau >= d.t_tot)
            throw ConfigError("target round-trip delay exceeds the PRI");
        TargetBins b;
        b.l = cfg.bandwidth_hz * tau;
        b.kappa = d.t_r * 2.0 * t.velocity_mps * cfg.carrier_hz / speed_of_light;
        if (t.amplitude_override)
            b.alpha = *t.amplitude_override;
        else
        {
            if (t.range_m <= 0.0)
                throw ConfigError("radar equation needs a positive range");
            b.alpha = std::sqrt(radar_power_gain(t.range_m, t.rcs_m2, cfg.carrier_hz, ch.g_t_dbi, ch.g_r_dbi));
        }
        return b;
    }

    inline double bins_to_range(double l, const FrameConfig &cfg) { return l * speed_of_light / (2.0 * cfg.bandwidth_hz); }

    inline double bins_to_velocity(double kappa, const FrameConfig &cfg)
    {
        return kappa * speed_of_light / (2.0 * cfg.carrier_hz * frame_dims(cfg).t_r);
    }

    // Circular fractional delay by frac samples through a frequency-domain linear phase.
    inline cvec fractional_delay(const cvec &x, double frac)
    {
        if (frac == 0.0)
            return x;
        const std::size_t N = x.size();
        cvec X = fft_unitary(x);
        for (std::size_t k = 0; k < N; ++k)
        {
            double kk = k < (N + 1) / 2 ? double(k) : double(k) - double(N);
            X[k] *= std::polar(1.0, -2.0 * pi * kk * frac / double(N));
        }
        return ifft_unitary(X);
    }

    // Observation-window echo: composite of the previous comm tail, guard, radar burst, guard and
    // current comm head, shifted by l, Doppler-rotated per sample and scaled.
    inline Signal apply_delay_doppler(const PriFrame &frame, const PriFrame &prev, double l, double kappa, cplx alpha,
                                      const FrameConfig &cfg)
    {
        const FrameDims d = frame_dims(cfg);
        const std::size_t N = d.n_obs;
        if (frame.samples.size() != d.n_tot || prev.samples.size() != d.n_tot)
            throw DimensionError("apply_delay_doppler: frame length mismatch");
        if (l < 0.0 || l >= double(N))
            throw ConfigError("apply_delay_doppler: delay outside the observation window");
        const std::size_t li = std::size_t(std::floor(l));
        const double lf = l - double(li);

        cvec composite(N);
        for (std::size_t m = 0; m < N; ++m)
            composite[m] = m < N - li ? frame.samples[m] : prev.samples[d.n_tot - (N - m)];

        cvec out(N);
        for (std::size_t n = 0; n < N; ++n)
            out[n] = composite[(n + N - li) % N];
        out = fractional_delay(out, lf);

        const double nr = double(cfg.afdm.n_r);
        const cplx a_hat = alpha * std::polar(1.0, -2.0 * pi * kappa * l / nr);
        for (std::size_t n = 0; n < N; ++n)
        {
            double ph = kappa * double(n) / nr;
            ph -= std::floor(ph);
            out[n] *= a_hat * std::polar(1.0, -2.0 * pi * ph);
        }
        return Signal(std::move(out), Domain::Time);
    }

    struct RxComponents
    {
        cvec echo;
        cvec si;
        cvec noise;
        cvec replica; // transmitted observation-window segment (guard, comm burst, guard)
        std::vector<TargetBins> bins;

        Signal total() const
        {
            cvec t(echo.size());
            for (std::size_t i = 0; i < t.size(); ++i)
                t[i] = echo[i] + si[i] + noise[i];
            return Signal(std::move(t), Domain::Time);
        }
    };

    inline cvec observation_replica(const PriFrame &frame, const FrameConfig &cfg)
    {
        const FrameDims d = frame_dims(cfg);
        return cvec(frame.samples.samples.begin() + std::ptrdiff_t(d.n_r_tot), frame.samples.samples.end());
    }

    inline RxComponents simulate_rx_components(const PriFrame &frame, const PriFrame &prev, const ChannelConfig &ch,
                                               const FrameConfig &cfg, Rng &rng)
    {
        const FrameDims d = frame_dims(cfg);
        const std::size_t N = d.n_obs;
        RxComponents rx;
        rx.echo.assign(N, 0.0);
        for (const auto &t : ch.targets)
        {
            TargetBins b = target_to_bins(t, cfg, ch);
            rx.bins.push_back(b);
            Signal e = apply_delay_doppler(frame, prev, b.l, b.kappa, b.alpha, cfg);
            for (std::size_t n = 0; n < N; ++n)
                rx.echo[n] += e[n];
        }

        rx.replica = observation_replica(frame, cfg);
        rx.si.assign(N, 0.0);
        if (ch.si.beta != 0.0 || !ch.si.taps.empty())
        {
            for (std::size_t n = 0; n < N; ++n)
                rx.si[n] = ch.si.beta * rx.replica[n];
            for (const auto &[delay, gain] : ch.si.taps)
                for (std::size_t n = delay; n < N; ++n)
                    rx.si[n] += gain * rx.replica[n - delay];
        }

        rx.noise.assign(N, 0.0);
        const double var = noise_variance(ch, cfg.bandwidth_hz);
        if (var > 0.0)
        {
            std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
            for (auto &v : rx.noise)
                v = cplx(g(rng), g(rng));
        }
        return rx;
    }

    inline Signal simulate_rx(const PriFrame &frame, const PriFrame &prev, const ChannelConfig &ch, const FrameConfig &cfg,
                              Rng &rng)
    {
        return simulate_rx_components(frame, prev, ch, cfg, rng).total();
    }
}
