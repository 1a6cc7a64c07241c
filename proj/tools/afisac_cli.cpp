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

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include <afisac/afisac.hpp>

using namespace afisac;

namespace
{
    constexpr int exit_ok = 0, exit_config = 2, exit_numeric = 3;

    // Reference frame: the library defaults.
    FrameConfig reference_frame()
    {
        return FrameConfig{};
    }

    void oracle_se()
    {
        const FrameConfig f = reference_frame();
        for (auto [np, g] : {std::pair<std::size_t, std::size_t>{1, 0}, {16, 2}})
        {
            PilotLayout pl;
            pl.n_pilots = np;
            pl.guard_size = g;
            const SeBreakdown b = se_breakdown(f, pl, 0, 1.0);
            std::printf("pilots=%zu guard=%zu n_r_eff=%lld n_c_eff=%lld n_tot=%lld eta/log2(1+sinr)=%lld/%lld "
                        "m_conv=%lld eta_conv/log2(1+sinr)=%lld/%lld\n",
                        np, g, (long long)b.n_r_eff, (long long)b.n_c_eff, (long long)b.n_tot,
                        (long long)(b.n_r_eff + b.n_c_eff), (long long)b.n_tot, (long long)b.m_conv,
                        (long long)b.conv_eff, (long long)b.conv_tot);
        }
    }

    void oracle_complexity()
    {
        const FrameConfig f = reference_frame();
        const FrameDims d = frame_dims(f);
        const std::size_t n_cg = d.n_c_tot + 2 * f.n_g, n_w = 2 * d.n_r_tot;
        const ComplexityRecord c = complexity_terms(n_cg, n_w, d.n_r_tot, {2, 2}, 256, 2 * pctd_side(256));
        std::printf("n_cg=%zu n_w=%zu n_r_tot=%zu q=[2,2] n_s=256 n_zp=%zu\n", n_cg, n_w, d.n_r_tot, c.n_zp);
        std::printf("o1=%.6f o2=%.1f o3=%.6f total=%.6f\n", c.o1, c.o2, c.o3, c.total);
    }

    void oracle_rmse()
    {
        const RmseReport r = rmse({EstimatePoint{103.0, 0.0}, EstimatePoint{204.0, 0.0}}, {{100.0, 0.0}, {200.0, 0.0}});
        std::printf("mean_abs=%.6f root_mean_square=%.6f\n", r.range_rmse_m, r.range_rmse_conv_m);
    }

    void oracle_shift()
    {
        const std::size_t N = 128, m0 = 5, l = 10;
        const DaftParams p(N, Rational(3, 128), Rational(0));
        cvec x(N, 0.0);
        x[m0] = 1.0;
        const cvec s = idaft(x, p);
        cvec r(N);
        for (std::size_t n = 0; n < N; ++n)
        {
            // CPP-consistent cyclic delay: s[n - l] with the chirp-periodic phase on wrap.
            const std::int64_t k = std::int64_t(n) - std::int64_t(l);
            cplx v = s[std::size_t((k + std::int64_t(N)) % std::int64_t(N))];
            if (k < 0)
                v *= std::polar(1.0, -2.0 * pi * frac_signed(p.c1, std::int64_t(N) * (std::int64_t(N) + 2 * k)));
            r[n] = v;
        }
        const cvec y = daft(r, p);
        std::size_t best = 0;
        for (std::size_t m = 1; m < N; ++m)
            if (std::abs(y[m]) > std::abs(y[best]))
                best = m;
        std::printf("N=%zu m0=%zu l=%zu 2Nc1=6 peak_bin=%zu expected=%zu\n", N, m0, l, best, (m0 + 6 * l) % N);
    }

    void oracle_marcum()
    {
        for (auto [a, b] : {std::pair<double, double>{0.0, 1.0}, {1.0, 1.0}, {2.0, 3.0}, {5.0, 5.2565}})
            std::printf("Q1(%.4f, %.4f) = %.12f\n", a, b, marcum_q1(a, b));
        for (double g : {0.0, 5.0, 10.0, 15.0})
            std::printf("pd(sinr=%.0f dB, pfa=1e-6) = %.9f\n", g, pd_analytic(db_to_lin(g), 1e-6));
    }

    void oracle_grid()
    {
        for (std::size_t z : {1, 2, 4})
        {
            const std::size_t K = pctd_side(1024);
            std::printf("z_p=%zu K=%zu N_zp=%zu step=1/%zu half_step=%.6f\n", z, K, z * K, z * K, 0.5 / double(z * K));
        }
    }

    const std::map<std::string, std::function<void()>> &oracles()
    {
        static const std::map<std::string, std::function<void()>> m{
            {"se-reference", oracle_se},  {"complexity-reference", oracle_complexity}, {"rmse-two-targets", oracle_rmse},
            {"shift-theorem", oracle_shift}, {"marcum", oracle_marcum}, {"pctd-grid", oracle_grid}};
        return m;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"afisac: affine-domain full-duplex ISAC simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, oracle_name;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::size_t threads = 1;

    auto *run = app.add_subcommand("run", "run a scenario sweep");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--trials", trials, "Monte Carlo trials per sweep point");
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto *val = app.add_subcommand("validate", "check a scenario without running it");
    val->add_option("scenario", scenario_path, "scenario file")->required();

    auto *orc = app.add_subcommand("oracle", "print a named derived value");
    orc->add_option("name", oracle_name, "oracle name")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*val)
        {
            validate_scenario(load_scenario(scenario_path));
            std::cout << "ok\n";
            return exit_ok;
        }
        if (*orc)
        {
            auto it = oracles().find(oracle_name);
            if (it == oracles().end())
            {
                std::cerr << "unknown oracle '" << oracle_name << "'; known:";
                for (const auto &[k, v] : oracles())
                    std::cerr << ' ' << k;
                std::cerr << '\n';
                return exit_config;
            }
            it->second();
            return exit_ok;
        }
        RunOptions opt;
        opt.out = out_dir;
        opt.seed = seed;
        opt.trials = trials;
        opt.threads = threads;
        const RunSummary sum = run_scenario(load_scenario(scenario_path), opt);
        std::cout << "wrote " << sum.points.size() << " sweep points to " << sum.out_dir << " in " << sum.wall_seconds
                  << " s\n";
        return exit_ok;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const DimensionError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const PointFailure &e)
    {
        std::cerr << "numeric failure at sweep point (series=" << e.series_value << ", sweep=" << e.sweep_value
                  << "): " << e.what() << '\n';
        return exit_numeric;
    }
    catch (const IoError &e)
    {
        std::cerr << "i/o error: " << e.what() << '\n';
        return exit_numeric;
    }
    catch (const std::exception &e)
    {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }
}
