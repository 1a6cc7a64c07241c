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

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pipeline.hpp"

namespace afisac
{
    // Scenario grammar, one statement per line:
    //   # comment                   ignored, also after a value
    //   [section]                   prefixes following keys with "section."
    //   key = value                 dotted keys address nested fields
    //   [target.N]                  N-th target, N counted from 0 without gaps
    // Lists are comma separated. Rationals are written p/q.
    struct SweepAxis
    {
        std::string variable;
        std::vector<std::string> values;
    };

    struct Scenario
    {
        PipelineConfig base;
        SweepAxis sweep;  // empty variable: a single point
        SweepAxis series; // optional outer axis, e.g. target range for a family of curves
        std::size_t trials = 1;
        std::uint64_t seed = 1;
        std::string outputs = "out";
        std::map<std::string, std::string> entries; // every parsed key, for the manifest echo
    };

    namespace detail
    {
        inline std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return "";
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        inline std::vector<std::string> split_list(const std::string &s)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        inline double to_double(const std::string &key, const std::string &v)
        {
            try
            {
                std::size_t pos = 0;
                double d = std::stod(v, &pos);
                if (pos != v.size() || !std::isfinite(d))
                    throw std::invalid_argument(v);
                return d;
            }
            catch (const std::logic_error &)
            {
                throw ConfigError(key + ": expected a number, got '" + v + "'");
            }
        }

        inline std::size_t to_size(const std::string &key, const std::string &v)
        {
            const double d = to_double(key, v);
            if (d < 0.0 || d != std::floor(d) || d > 9.0e15)
                throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
            return std::size_t(d);
        }

        inline bool to_bool(const std::string &key, const std::string &v)
        {
            if (v == "true" || v == "1" || v == "yes")
                return true;
            if (v == "false" || v == "0" || v == "no")
                return false;
            throw ConfigError(key + ": expected true or false, got '" + v + "'");
        }

        inline Rational to_rational(const std::string &key, const std::string &v)
        {
            try
            {
                return parse_rational(v);
            }
            catch (const ConfigError &)
            {
                throw ConfigError(key + ": expected a rational p/q, got '" + v + "'");
            }
        }

        using Setter = std::function<void(PipelineConfig &, const std::string &key, const std::string &v)>;

        inline const std::map<std::string, Setter> &setters()
        {
            static const std::map<std::string, Setter> table = [] {
                std::map<std::string, Setter> t;
                auto dbl = [&](const std::string &k, std::function<double &(PipelineConfig &)> f) {
                    t[k] = [f](PipelineConfig &c, const std::string &key, const std::string &v) { f(c) = to_double(key, v); };
                };
                auto sz = [&](const std::string &k, std::function<std::size_t &(PipelineConfig &)> f) {
                    t[k] = [f](PipelineConfig &c, const std::string &key, const std::string &v) { f(c) = to_size(key, v); };
                };
                auto bl = [&](const std::string &k, std::function<bool &(PipelineConfig &)> f) {
                    t[k] = [f](PipelineConfig &c, const std::string &key, const std::string &v) { f(c) = to_bool(key, v); };
                };
                auto rat = [&](const std::string &k, std::function<Rational &(PipelineConfig &)> f) {
                    t[k] = [f](PipelineConfig &c, const std::string &key, const std::string &v) { f(c) = to_rational(key, v); };
                };
                auto qam = [&](const std::string &k, std::function<ModAlphabet &(PipelineConfig &)> f) {
                    t[k] = [f](PipelineConfig &c, const std::string &key, const std::string &v) {
                        f(c).order = int(to_size(key, v));
                        f(c).validate();
                    };
                };

                sz("frame.n_g", [](PipelineConfig &c) -> auto & { return c.frame.n_g; });
                sz("frame.j_pris", [](PipelineConfig &c) -> auto & { return c.frame.j_pris; });
                dbl("frame.bandwidth_hz", [](PipelineConfig &c) -> auto & { return c.frame.bandwidth_hz; });
                dbl("frame.carrier_hz", [](PipelineConfig &c) -> auto & { return c.frame.carrier_hz; });
                sz("frame.afdm.n_r", [](PipelineConfig &c) -> auto & { return c.frame.afdm.n_r; });
                sz("frame.afdm.m_r", [](PipelineConfig &c) -> auto & { return c.frame.afdm.m_r; });
                sz("frame.afdm.l_cpp", [](PipelineConfig &c) -> auto & { return c.frame.afdm.l_cpp; });
                rat("frame.afdm.c1", [](PipelineConfig &c) -> auto & { return c.frame.afdm.c1; });
                rat("frame.afdm.c2", [](PipelineConfig &c) -> auto & { return c.frame.afdm.c2; });
                qam("frame.afdm.qam", [](PipelineConfig &c) -> auto & { return c.frame.afdm.alphabet; });
                sz("frame.afdm.pilots", [](PipelineConfig &c) -> auto & { return c.frame.afdm.pilot_layout.n_pilots; });
                sz("frame.afdm.guard", [](PipelineConfig &c) -> auto & { return c.frame.afdm.pilot_layout.guard_size; });
                bl("frame.afdm.data_fill", [](PipelineConfig &c) -> auto & { return c.frame.afdm.pilot_layout.data_fill; });
                t["frame.afdm.pilot_power_db"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    c.frame.afdm.pilot_layout.pilot_power = db_to_lin(to_double(key, v));
                };
                sz("frame.ofdm.n_c", [](PipelineConfig &c) -> auto & { return c.frame.ofdm.n_c; });
                sz("frame.ofdm.m_c", [](PipelineConfig &c) -> auto & { return c.frame.ofdm.m_c; });
                sz("frame.ofdm.l_cp", [](PipelineConfig &c) -> auto & { return c.frame.ofdm.l_cp; });
                sz("frame.ofdm.pilots", [](PipelineConfig &c) -> auto & { return c.frame.ofdm.n_c_pilots; });
                qam("frame.ofdm.qam", [](PipelineConfig &c) -> auto & { return c.frame.ofdm.alphabet; });

                dbl("channel.noise_psd_dbm_hz", [](PipelineConfig &c) -> auto & { return c.channel.noise_psd_dbm_hz; });
                bl("channel.noise", [](PipelineConfig &c) -> auto & { return c.channel.noise_enabled; });
                t["channel.noise_variance"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    c.channel.noise_variance_override = to_double(key, v);
                };
                dbl("channel.g_t_dbi", [](PipelineConfig &c) -> auto & { return c.channel.g_t_dbi; });
                dbl("channel.g_r_dbi", [](PipelineConfig &c) -> auto & { return c.channel.g_r_dbi; });
                // SI leak: power in dB relative to unit transmit power, or relative to the first echo.
                t["channel.si_db"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    c.channel.si.beta = std::sqrt(db_to_lin(to_double(key, v)));
                };
                t["channel.si_above_echo_db"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    if (c.channel.targets.empty())
                        throw ConfigError(key + ": needs a target defined before it");
                    const double a = std::abs(target_to_bins(c.channel.targets.front(), c.frame, c.channel).alpha);
                    c.channel.si.beta = a * std::sqrt(db_to_lin(to_double(key, v)));
                };

                dbl("sic.epsilon", [](PipelineConfig &c) -> auto & { return c.sic.epsilon; });
                t["sic.epsilon_db"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    c.sic.epsilon = std::sqrt(db_to_lin(to_double(key, v)));
                };
                dbl("sic.epsilon_rho_db", [](PipelineConfig &c) -> auto & { return c.sic.epsilon_rho_db; });
                t["sic.thresholds"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    c.sic.threshold_schedule.clear();
                    for (const auto &s : split_list(v))
                        c.sic.threshold_schedule.push_back(to_double(key, s));
                };
                dbl("sic.zeta1", [](PipelineConfig &c) -> auto & { return c.sic.zeta1; });
                dbl("sic.reduction", [](PipelineConfig &c) -> auto & { return c.sic.reduction; });
                t["sic.scale"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    if (v == "absolute")
                        c.sic.scale = ThresholdScale::Absolute;
                    else if (v == "floor")
                        c.sic.scale = ThresholdScale::Floor;
                    else if (v == "peak")
                        c.sic.scale = ThresholdScale::Peak;
                    else
                        throw ConfigError(key + ": expected absolute, floor or peak");
                };
                sz("sic.n_w", [](PipelineConfig &c) -> auto & { return c.sic.n_w; });
                sz("sic.n_w_iter", [](PipelineConfig &c) -> auto & { return c.sic.n_w_iter; });
                sz("sic.rho_max", [](PipelineConfig &c) -> auto & { return c.sic.rho_max; });
                dbl("sic.kaiser_beta", [](PipelineConfig &c) -> auto & { return c.sic.kaiser_beta; });
                t["sic.mode"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    if (v == "analytic" || v == "a")
                        c.sic.mode = ResidualMode::Analytic;
                    else if (v == "measured" || v == "b")
                        c.sic.mode = ResidualMode::Measured;
                    else
                        throw ConfigError(key + ": expected analytic or measured");
                };

                sz("pctd.z_p", [](PipelineConfig &c) -> auto & { return c.pctd.z_p; });
                dbl("pctd.pfa", [](PipelineConfig &c) -> auto & { return c.pctd.detector_pfa; });
                sz("pctd.gates", [](PipelineConfig &c) -> auto & { return c.pctd.gates; });
                dbl("pctd.slow_time_beta", [](PipelineConfig &c) -> auto & { return c.pctd.slow_time_beta; });
                t["pctd.noise_sigma"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    c.pctd.noise_sigma = to_double(key, v);
                };
                t["pctd.floor"] = [](PipelineConfig &c, const std::string &key, const std::string &v) {
                    if (v == "gate")
                        c.pctd.floor_mode = FloorMode::PerGate;
                    else if (v == "global")
                        c.pctd.floor_mode = FloorMode::Global;
                    else if (v == "thermal")
                        c.pctd.floor_mode = FloorMode::Thermal;
                    else
                        throw ConfigError(key + ": expected gate, global or thermal");
                };

                bl("receiver.cancel", [](PipelineConfig &c) -> auto & { return c.cancel; });
                dbl("receiver.assoc_range_gates", [](PipelineConfig &c) -> auto & { return c.assoc_range_gates; });
                dbl("receiver.assoc_doppler_bins", [](PipelineConfig &c) -> auto & { return c.assoc_doppler_bins; });
                return t;
            }();
            return table;
        }

        // target.N.field
        inline bool set_target(PipelineConfig &c, const std::string &key, const std::string &v)
        {
            if (key.rfind("target.", 0) != 0)
                return false;
            const auto dot = key.find('.', 7);
            if (dot == std::string::npos)
                throw ConfigError(key + ": expected target.N.field");
            const std::size_t idx = to_size(key, key.substr(7, dot - 7));
            const std::string field = key.substr(dot + 1);
            if (idx > c.channel.targets.size())
                throw ConfigError(key + ": targets must be numbered from 0 without gaps");
            if (idx == c.channel.targets.size())
                c.channel.targets.emplace_back();
            Target &t = c.channel.targets[idx];
            if (field == "range_m")
                t.range_m = to_double(key, v);
            else if (field == "velocity_mps")
                t.velocity_mps = to_double(key, v);
            else if (field == "rcs_m2")
                t.rcs_m2 = to_double(key, v);
            else if (field == "amplitude")
                t.amplitude_override = cplx(to_double(key, v), 0.0);
            else if (field == "range_gates")
                t.range_m = bins_to_range(to_double(key, v), c.frame);
            else
                throw ConfigError(key + ": unknown target field");
            return true;
        }
    }

    inline bool is_config_key(const std::string &key)
    {
        if (key.rfind("target.", 0) == 0)
        {
            PipelineConfig probe;
            probe.channel.targets.resize(64);
            try
            {
                return detail::set_target(probe, key, "1");
            }
            catch (const ConfigError &)
            {
                return false;
            }
        }
        return detail::setters().count(key) > 0;
    }

    inline void apply_setting(PipelineConfig &c, const std::string &key, const std::string &v)
    {
        if (detail::set_target(c, key, v))
            return;
        auto it = detail::setters().find(key);
        if (it == detail::setters().end())
            throw ConfigError("unknown key '" + key + "'");
        it->second(c, key, v);
    }

    // Configuration of one sweep point. Keys that depend on others (SI relative to the echo) are
    // re-applied after the swept values.
    inline PipelineConfig point_config(const Scenario &s, const std::string &series_value, const std::string &sweep_value)
    {
        PipelineConfig c = s.base;
        if (!s.series.variable.empty())
            apply_setting(c, s.series.variable, series_value);
        if (!s.sweep.variable.empty())
            apply_setting(c, s.sweep.variable, sweep_value);
        if (auto it = s.entries.find("channel.si_above_echo_db"); it != s.entries.end())
            apply_setting(c, it->first, it->second);
        c.validate();
        return c;
    }

    inline Scenario parse_scenario(std::istream &in, const std::string &origin = "<scenario>")
    {
        Scenario s;
        std::vector<std::pair<std::string, std::string>> ordered;
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            line = detail::trim(line);
            if (line.empty())
                continue;
            const std::string where = origin + ":" + std::to_string(lineno) + ": ";
            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ConfigError(where + "unterminated section header");
                section = detail::trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(where + "expected key = value");
            std::string key = detail::trim(line.substr(0, eq));
            const std::string val = detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(where + "empty key");
            if (!section.empty())
                key = section + "." + key;
            if (s.entries.count(key))
                throw ConfigError(where + "duplicate key '" + key + "'");
            s.entries[key] = val;
            ordered.emplace_back(key, val);
        }

        for (const auto &[key, val] : ordered)
        {
            try
            {
                if (key == "run.trials")
                    s.trials = detail::to_size(key, val);
                else if (key == "run.seed")
                    s.seed = std::uint64_t(detail::to_size(key, val));
                else if (key == "run.outputs")
                    s.outputs = val;
                else if (key == "sweep.variable")
                    s.sweep.variable = val;
                else if (key == "sweep.values")
                    s.sweep.values = detail::split_list(val);
                else if (key == "series.variable")
                    s.series.variable = val;
                else if (key == "series.values")
                    s.series.values = detail::split_list(val);
                else if (key == "channel.si_above_echo_db")
                    continue; // needs the targets, applied last
                else
                    apply_setting(s.base, key, val);
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(origin + ": " + e.what());
            }
        }
        if (auto it = s.entries.find("channel.si_above_echo_db"); it != s.entries.end())
        {
            try
            {
                apply_setting(s.base, it->first, it->second);
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(origin + ": " + e.what());
            }
        }
        return s;
    }

    inline Scenario load_scenario(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("cannot open scenario '" + path + "'");
        return parse_scenario(f, path);
    }

    inline void validate_scenario(const Scenario &s)
    {
        if (s.trials < 1)
            throw ConfigError("run.trials must be >= 1");
        for (const SweepAxis *ax : {&s.sweep, &s.series})
        {
            if (ax->variable.empty())
            {
                if (!ax->values.empty())
                    throw ConfigError("axis values given without a variable");
                continue;
            }
            if (!is_config_key(ax->variable))
                throw ConfigError("sweep variable '" + ax->variable + "' does not name a config field");
            if (ax->values.empty())
                throw ConfigError("sweep variable '" + ax->variable + "' has no values");
        }
        const std::vector<std::string> one{""};
        const auto &sv = s.series.variable.empty() ? one : s.series.values;
        const auto &wv = s.sweep.variable.empty() ? one : s.sweep.values;
        for (const auto &a : sv)
            for (const auto &b : wv)
            {
                PipelineConfig c = point_config(s, a, b);
                for (const auto &t : c.channel.targets)
                    target_to_bins(t, c.frame, c.channel);
            }
    }
}
