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

#include <array>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "io.hpp"
#include "scenario.hpp"

namespace afisac
{
    inline constexpr const char *version_string = "0.1.0";

    // A trial failed for numerical reasons; carries the sweep point for the report.
    class PointFailure : public std::runtime_error
    {
      public:
        PointFailure(const std::string &what, std::string series, std::string sweep)
            : std::runtime_error(what), series_value(std::move(series)), sweep_value(std::move(sweep))
        {
        }
        std::string series_value, sweep_value;
    };

    struct RunOptions
    {
        std::string out;                    // empty keeps the scenario's directory
        std::optional<std::uint64_t> seed;  // overrides run.seed
        std::optional<std::size_t> trials;  // overrides run.trials
        std::size_t threads = 1;
        bool write_files = true;
    };

    struct TrialRecord
    {
        std::vector<std::optional<EstimatePoint>> estimates;
        std::size_t detections = 0;
        std::size_t false_alarms = 0;
        double n_s = 0.0;
        ComplexityRecord complexity;
        double seconds = 0.0;
    };

    struct PointRecord
    {
        std::string series_value, sweep_value;
        PipelineConfig config;
        std::vector<EstimatePoint> truths;
        std::vector<TrialRecord> trials;
        std::optional<RangeDopplerMap> representative;
    };

    struct RunSummary
    {
        std::vector<PointRecord> points;
        std::uint64_t seed = 0;
        std::size_t trials = 0;
        std::size_t threads = 1;
        double wall_seconds = 0.0;
        std::string out_dir;
    };

    // Seed of one trial, mixed from the base seed and the work-item coordinates.
    inline std::uint64_t trial_seed(std::uint64_t base, std::size_t point, std::size_t trial)
    {
        std::seed_seq seq{std::uint32_t(base), std::uint32_t(base >> 32), std::uint32_t(point), std::uint32_t(trial)};
        std::array<std::uint32_t, 2> out{};
        seq.generate(out.begin(), out.end());
        return (std::uint64_t(out[0]) << 32) | out[1];
    }

    inline TrialRecord score_trial(const PipelineConfig &pc, const TrialOutput &t)
    {
        TrialRecord r;
        r.estimates = associated_points(t);
        r.detections = t.est.detections.size();
        std::size_t hit = 0;
        for (int a : t.est.truth_assoc)
            hit += a >= 0;
        r.false_alarms = r.detections - hit;
        r.n_s = double(t.sic.n_s);
        r.complexity = complexity_estimate(pc.frame, pc.sic, t.sic, pc.pctd.z_p);
        r.seconds = t.seconds;
        return r;
    }

    namespace detail
    {
        inline std::string opt_num(const std::optional<double> &v) { return v ? fmt(*v) : std::string(); }

        inline double mean_of(const std::vector<TrialRecord> &v, double TrialRecord::*f)
        {
            double s = 0.0;
            for (const auto &t : v)
                s += t.*f;
            return v.empty() ? 0.0 : s / double(v.size());
        }

        inline std::string variant(const PipelineConfig &c)
        {
            if (!c.cancel)
                return "raw";
            return c.sic.mode == ResidualMode::Analytic ? "sic_analytic" : "sic_measured";
        }

        inline void write_outputs(const Scenario &s, const RunSummary &sum)
        {
            namespace fs = std::filesystem;
            const std::string dir = sum.out_dir;
            std::error_code ec;
            fs::create_directories(fs::path(dir) / "rdm", ec);
            if (ec)
                throw IoError("cannot create '" + dir + "': " + ec.message());
            auto p = [&](const std::string &name) { return (fs::path(dir) / name).string(); };

            CsvWriter pd(p("pd_curve.csv"), {"series_variable", "series_value", "sweep_variable", "sweep_value",
                                              "variant", "trials", "targets", "detections", "p_d", "stderr",
                                              "false_alarms", "mean_sinr_db", "p_d_analytic"});
            CsvWriter rm(p("rmse.csv"), {"series_variable", "series_value", "sweep_variable", "sweep_value", "variant",
                                         "trials", "rmse_definition", "range_rmse_m", "velocity_rmse_mps",
                                         "associated", "misses"});
            CsvWriter se(p("se.csv"), {"series_variable", "series_value", "sweep_variable", "sweep_value", "variant",
                                       "trials", "sinr_db", "n_r_eff", "n_c_eff", "n_tot", "eta", "eta_conv"});
            CsvWriter cx(p("complexity.csv"), {"series_variable", "series_value", "sweep_variable", "sweep_value",
                                               "variant", "trials", "o1", "o2", "o3", "total", "mean_n_s"});

            for (std::size_t k = 0; k < sum.points.size(); ++k)
            {
                const PointRecord &pt = sum.points[k];
                const PipelineConfig &c = pt.config;
                const std::vector<std::string> label{s.series.variable, pt.series_value, s.sweep.variable,
                                                     pt.sweep_value, variant(c), std::to_string(pt.trials.size())};
                auto row = [&](std::vector<std::string> tail) {
                    std::vector<std::string> r = label;
                    r.insert(r.end(), tail.begin(), tail.end());
                    return r;
                };

                std::vector<std::optional<EstimatePoint>> est;
                std::vector<EstimatePoint> truth;
                std::size_t fa = 0;
                for (const auto &t : pt.trials)
                {
                    est.insert(est.end(), t.estimates.begin(), t.estimates.end());
                    truth.insert(truth.end(), pt.truths.begin(), pt.truths.end());
                    fa += t.false_alarms;
                }
                const RmseReport rr = rmse(est, truth);
                const std::size_t n = truth.size();
                const double pdv = n ? double(rr.associated) / double(n) : 0.0;
                const double se_pd = n ? std::sqrt(pdv * (1.0 - pdv) / double(n)) : 0.0;

                const double n_s = mean_of(pt.trials, &TrialRecord::n_s);
                std::optional<double> sinr_lin, pd_an;
                if (auto b = link_budget(c, n_s); b && b->path_terms > 0.0)
                {
                    sinr_lin = sinr(*b);
                    pd_an = pd_analytic(*sinr_lin, c.pctd.detector_pfa);
                }
                std::optional<double> sinr_db;
                if (sinr_lin && *sinr_lin > 0.0)
                    sinr_db = lin_to_db(*sinr_lin);

                pd.row(row({std::to_string(pt.truths.size()), std::to_string(rr.associated), fmt(pdv), fmt(se_pd),
                            std::to_string(fa), opt_num(sinr_db), opt_num(pd_an)}));

                auto rm_num = [&](double v) { return rr.associated ? fmt(v) : std::string(); };
                rm.row(row({"mean_abs", rm_num(rr.range_rmse_m), rm_num(rr.velocity_rmse_mps),
                            std::to_string(rr.associated), std::to_string(rr.misses)}));
                rm.row(row({"root_mean_square", rm_num(rr.range_rmse_conv_m), rm_num(rr.velocity_rmse_conv_mps),
                            std::to_string(rr.associated), std::to_string(rr.misses)}));

                if (sinr_lin)
                {
                    const SeBreakdown b =
                        se_breakdown(c.frame, c.frame.afdm.pilot_layout, c.frame.ofdm.n_c_pilots, *sinr_lin);
                    se.row(row({opt_num(sinr_db), std::to_string(b.n_r_eff), std::to_string(b.n_c_eff),
                                std::to_string(b.n_tot), fmt(b.eta), fmt(b.eta_conv)}));
                }
                else
                    se.row(row({"", "", "", "", "", ""}));

                double o1 = 0, o2 = 0, o3 = 0, tot = 0;
                for (const auto &t : pt.trials)
                {
                    o1 += t.complexity.o1;
                    o2 += t.complexity.o2;
                    o3 += t.complexity.o3;
                    tot += t.complexity.total;
                }
                const double m = double(std::max<std::size_t>(pt.trials.size(), 1));
                cx.row(row({fmt(o1 / m), fmt(o2 / m), fmt(o3 / m), fmt(tot / m), fmt(n_s)}));

                if (pt.representative)
                    emit_rdm(*pt.representative, p("rdm/point_" + std::to_string(k)));
            }

            nlohmann::json j;
            j["tool"] = "afisac";
            j["version"] = version_string;
            j["seed"] = sum.seed;
            j["trials"] = sum.trials;
            j["threads"] = sum.threads;
            j["wall_seconds"] = sum.wall_seconds;
            j["config"] = s.entries;
            j["sweep"] = {{"variable", s.sweep.variable}, {"values", s.sweep.values}};
            j["series"] = {{"variable", s.series.variable}, {"values", s.series.values}};
            nlohmann::json pts = nlohmann::json::array();
            for (std::size_t k = 0; k < sum.points.size(); ++k)
            {
                std::vector<std::uint64_t> seeds;
                for (std::size_t t = 0; t < sum.points[k].trials.size(); ++t)
                    seeds.push_back(trial_seed(sum.seed, k, t));
                pts.push_back({{"index", k},
                               {"series_value", sum.points[k].series_value},
                               {"sweep_value", sum.points[k].sweep_value},
                               {"rdm", "rdm/point_" + std::to_string(k)},
                               {"mean_trial_seconds", detail::mean_of(sum.points[k].trials, &TrialRecord::seconds)},
                               {"trial_seeds", seeds}});
            }
            j["points"] = pts;
            auto f = open_out(p("manifest.json"));
            f << j.dump(2) << '\n';
        }
    }

    // Sweep points x trials on a shared work queue. Workers only read the scenario; results go to
    // preallocated slots, so the output does not depend on scheduling.
    inline RunSummary run_scenario(const Scenario &s_in, const RunOptions &opt = {})
    {
        Scenario s = s_in;
        if (opt.seed)
            s.seed = *opt.seed;
        if (opt.trials)
            s.trials = *opt.trials;
        validate_scenario(s);
        const auto t0 = std::chrono::steady_clock::now();

        RunSummary sum;
        sum.seed = s.seed;
        sum.trials = s.trials;
        sum.threads = std::max<std::size_t>(opt.threads, 1);
        sum.out_dir = opt.out.empty() ? s.outputs : opt.out;

        const std::vector<std::string> one{""};
        const auto &sv = s.series.variable.empty() ? one : s.series.values;
        const auto &wv = s.sweep.variable.empty() ? one : s.sweep.values;
        for (const auto &a : sv)
            for (const auto &b : wv)
            {
                PointRecord pt;
                pt.series_value = a;
                pt.sweep_value = b;
                pt.config = point_config(s, a, b);
                pt.truths = truth_points(pt.config.channel);
                pt.trials.resize(s.trials);
                sum.points.push_back(std::move(pt));
            }

        const std::size_t total = sum.points.size() * s.trials;
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::mutex err_mu;
        std::optional<PointFailure> failure;
        auto worker = [&] {
            for (;;)
            {
                const std::size_t item = next.fetch_add(1);
                if (item >= total || stop)
                    return;
                const std::size_t k = item / s.trials, t = item % s.trials;
                PointRecord &pt = sum.points[k];
                try
                {
                    TrialOutput out = run_trial(pt.config, trial_seed(s.seed, k, t));
                    pt.trials[t] = score_trial(pt.config, out);
                    if (t == 0)
                        pt.representative = std::move(out.map);
                }
                catch (const std::exception &e)
                {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!failure)
                        failure.emplace(e.what(), pt.series_value, pt.sweep_value);
                    stop = true;
                    return;
                }
            }
        };
        if (sum.threads == 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t i = 0; i < sum.threads; ++i)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }
        if (failure)
            throw *failure;

        sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.write_files)
            detail::write_outputs(s, sum);
        return sum;
    }
}
