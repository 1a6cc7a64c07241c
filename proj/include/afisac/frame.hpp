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

#include "waveform.hpp"

namespace afisac
{
    struct FrameConfig
    {
        AfdmConfig afdm;
        OfdmConfig ofdm;
        std::size_t n_g = 32;
        std::size_t j_pris = 1;
        double bandwidth_hz = 120e6;
        double carrier_hz = 5.8e9;

        void validate() const
        {
            afdm.validate();
            ofdm.validate();
            if (j_pris < 1)
                throw ConfigError("frame: j_pris must be >= 1");
            if (!(bandwidth_hz > 0.0) || !(carrier_hz > 0.0))
                throw ConfigError("frame: bandwidth and carrier must be positive");
        }
    };

    struct FrameDims
    {
        std::size_t n_r_tot = 0;
        std::size_t n_c_tot = 0;
        std::size_t n_tot = 0;
        std::size_t n_obs = 0; // radar-silent observation window, n_tot - n_r_tot
        double t_sample = 0.0;
        double t_r = 0.0;
        double t_c = 0.0;
        double t_g = 0.0;
        double t_r_tot = 0.0;
        double t_c_tot = 0.0;
        double t_tot = 0.0;
    };

    inline FrameDims frame_dims(const FrameConfig &cfg)
    {
        FrameDims d;
        d.n_r_tot = (cfg.afdm.n_r + cfg.afdm.l_cpp) * cfg.afdm.m_r;
        d.n_c_tot = (cfg.ofdm.n_c + cfg.ofdm.l_cp) * cfg.ofdm.m_c;
        d.n_tot = d.n_r_tot + d.n_c_tot + 2 * cfg.n_g;
        d.n_obs = d.n_tot - d.n_r_tot;
        const double ts = 1.0 / cfg.bandwidth_hz;
        d.t_sample = ts;
        d.t_r = double(cfg.afdm.n_r) * ts;
        d.t_c = double(cfg.ofdm.n_c) * ts;
        d.t_g = double(cfg.n_g) * ts;
        d.t_r_tot = double(d.n_r_tot) * ts;
        d.t_c_tot = double(d.n_c_tot) * ts;
        d.t_tot = double(d.n_tot) * ts;
        return d;
    }

    struct IndexMap
    {
        std::size_t radar_begin = 0, radar_end = 0;
        std::size_t comm_begin = 0, comm_end = 0;
        std::size_t n_tot = 0;
    };

    struct PriFrame
    {
        Signal samples;
        std::vector<cvec> radar_payload; // affine-domain grid per radar symbol
        std::vector<cvec> comm_payload;  // frequency-domain data per OFDM symbol
        IndexMap index_map;
    };

    inline cvec radar_burst(const std::vector<cvec> &payload, const AfdmConfig &cfg)
    {
        cvec out;
        out.reserve(payload.size() * (cfg.n_r + cfg.l_cpp));
        for (const auto &x : payload)
        {
            Signal s = append_cpp(gen_afdm_symbol(x, cfg), cfg);
            out.insert(out.end(), s.samples.begin(), s.samples.end());
        }
        return out;
    }

    inline cvec comm_burst(const std::vector<cvec> &payload, const OfdmConfig &cfg)
    {
        cvec out;
        out.reserve(payload.size() * (cfg.n_c + cfg.l_cp));
        for (const auto &x : payload)
        {
            Signal s = append_cp(gen_ofdm_symbol(x, cfg), cfg.l_cp);
            out.insert(out.end(), s.samples.begin(), s.samples.end());
        }
        return out;
    }

    // [radar symbols with CPP | n_g zeros | OFDM symbols with CP | n_g zeros]
    inline PriFrame assemble_pri(const FrameConfig &cfg, Rng &rng)
    {
        cfg.validate();
        const FrameDims d = frame_dims(cfg);
        PriFrame f;
        for (std::size_t i = 0; i < cfg.afdm.m_r; ++i)
            f.radar_payload.push_back(build_pilot_grid(cfg.afdm.pilot_layout, cfg.afdm, rng));
        for (std::size_t i = 0; i < cfg.ofdm.m_c; ++i)
            f.comm_payload.push_back(random_qam(cfg.ofdm.n_c, cfg.ofdm.alphabet, rng));

        cvec s(d.n_tot, 0.0);
        cvec r = radar_burst(f.radar_payload, cfg.afdm);
        cvec c = comm_burst(f.comm_payload, cfg.ofdm);
        std::copy(r.begin(), r.end(), s.begin());
        std::copy(c.begin(), c.end(), s.begin() + std::ptrdiff_t(d.n_r_tot + cfg.n_g));
        f.samples = Signal(std::move(s), Domain::Time);
        f.index_map = {0, d.n_r_tot, d.n_r_tot + cfg.n_g, d.n_r_tot + cfg.n_g + d.n_c_tot, d.n_tot};
        return f;
    }
}
