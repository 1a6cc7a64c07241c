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

#include "common.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace afisac;
using namespace afisac::test;
namespace fs = std::filesystem;

namespace
{
    const char *small_scenario = R"(# desk-scale frame
[frame]
n_g = 32
afdm.n_r = 128
afdm.m_r = 16
afdm.l_cpp = 64
afdm.c1 = 3/128
afdm.c2 = 1/16384
afdm.pilots = 1
afdm.data_fill = false
afdm.pilot_power_db = 10
ofdm.n_c = 256
ofdm.m_c = 32
ofdm.l_cp = 16

[channel]
noise_variance = 1
si_above_echo_db = 40   # before the target on purpose

[target.0]
range_gates = 10
velocity_mps = 0
amplitude = 0.05

[sic]
mode = analytic
epsilon_db = -60
epsilon_rho_db = -20

[pctd]
gates = 32
z_p = 2

[run]
trials = 3
seed = 7
)";

    Scenario parse(const std::string &text)
    {
        std::istringstream in(text);
        return parse_scenario(in, "test");
    }

    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("afisac_test_" + name);
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream os;
        os << f.rdbuf();
        return os.str();
    }

    int run_cli(const std::string &args)
    {
        const int rc = std::system((std::string(AFISAC_CLI) + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }
}

TEST(Scenario, ParsesSectionsTargetsAndRationals)
{
    const Scenario s = parse(small_scenario);
    EXPECT_EQ(s.base.frame.afdm.c1, Rational(3, 128));
    EXPECT_EQ(s.base.frame.afdm.c2, Rational(1, 16384));
    EXPECT_EQ(s.base.frame.afdm.pilot_layout.n_pilots, 1u);
    EXPECT_FALSE(s.base.frame.afdm.pilot_layout.data_fill);
    EXPECT_NEAR(s.base.frame.afdm.pilot_layout.pilot_power, 10.0, 1e-12);
    ASSERT_EQ(s.base.channel.targets.size(), 1u);
    EXPECT_NEAR(s.base.channel.targets[0].range_m, 10.0 * speed_of_light / 240e6, 1e-9);
    // 40 dB above a 0.05 echo, even though the key came first
    EXPECT_NEAR(std::abs(s.base.channel.si.beta), 5.0, 1e-12);
    EXPECT_NEAR(s.base.sic.epsilon, 1e-3, 1e-15);
    EXPECT_EQ(s.base.sic.mode, ResidualMode::Analytic);
    EXPECT_EQ(s.trials, 3u);
    EXPECT_EQ(s.seed, 7u);
    EXPECT_NO_THROW(validate_scenario(s));
    EXPECT_EQ(parse("pctd.floor = thermal\n").base.pctd.floor_mode, FloorMode::Thermal);
}

TEST(Scenario, RejectsMalformedInput)
{
    EXPECT_THROW(parse("frame.n_g = 1\nframe.n_g = 2\n"), ConfigError);
    EXPECT_THROW(parse("frame.nope = 1\n"), ConfigError);
    EXPECT_THROW(parse("[frame\n"), ConfigError);
    EXPECT_THROW(parse("just words\n"), ConfigError);
    EXPECT_THROW(parse("frame.afdm.c1 = 0.01\n"), ConfigError);
    EXPECT_THROW(parse("sic.mode = fancy\n"), ConfigError);
    EXPECT_THROW(parse("pctd.floor = adaptive\n"), ConfigError);
    EXPECT_THROW(parse("target.1.range_m = 5\n"), ConfigError);
    EXPECT_THROW(parse("channel.si_above_echo_db = 3\n"), ConfigError);
    EXPECT_THROW(load_scenario("/nonexistent/afisac.scn"), ConfigError);
}

TEST(Scenario, SweepVariableMustNameAField)
{
    Scenario s = parse(std::string(small_scenario) + "[sweep]\nvariable = sic.warp\nvalues = 1, 2\n");
    EXPECT_THROW(validate_scenario(s), ConfigError);
    s = parse(std::string(small_scenario) + "[sweep]\nvariable = sic.epsilon_rho_db\n");
    EXPECT_THROW(validate_scenario(s), ConfigError);
    s = parse(std::string(small_scenario) + "[sweep]\nvariable = target.0.range_gates\nvalues = 8, 12\n");
    EXPECT_NO_THROW(validate_scenario(s));
}

TEST(Scenario, PointConfigAppliesAxesThenRelativeSi)
{
    const Scenario s =
        parse(std::string(small_scenario) + "[sweep]\nvariable = target.0.amplitude\nvalues = 0.1, 0.2\n"
                                            "[series]\nvariable = sic.epsilon_rho_db\nvalues = -10, -30\n");
    const PipelineConfig c = point_config(s, "-30", "0.2");
    EXPECT_EQ(c.sic.epsilon_rho_db, -30.0);
    EXPECT_EQ(*c.channel.targets[0].amplitude_override, cplx(0.2));
    EXPECT_NEAR(std::abs(c.channel.si.beta), 20.0, 1e-12);
}

TEST(Rdm, EmitRoundTripAndFloor)
{
    Rng rng(51);
    PctdConfig cfg;
    cfg.gates = 12;
    cvec h = random_cvec(256, rng);
    for (std::size_t p = 0; p < 16; ++p)
        h[p + 16 * 5] = 0.0; // silent gate
    const RangeDopplerMap map = build_rdm(Signal(h, Domain::Time), 16, 12, small_frame(), cfg);
    const fs::path dir = scratch("rdm");
    const std::string stem = (dir / "m").string();
    emit_rdm(map, stem);
    const CMatrix back = load_rdm(stem);
    ASSERT_EQ(back.rows(), map.doppler_matrix.rows());
    ASSERT_EQ(back.cols(), 12);
    for (Eigen::Index r = 0; r < back.rows(); ++r)
        for (Eigen::Index c = 0; c < back.cols(); ++c)
        {
            const cplx v = map.doppler_matrix(r, c);
            // float32 storage: round to nearest, half an ulp at most
            EXPECT_LE(std::abs(back(r, c).real() - v.real()), std::ldexp(std::abs(v.real()), -24));
            EXPECT_LE(std::abs(back(r, c).imag() - v.imag()), std::ldexp(std::abs(v.imag()), -24));
        }

    std::ifstream csv(stem + ".csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(csv, line))
    {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');)
            cells.push_back(c);
        ASSERT_EQ(cells.size(), 12u);
        EXPECT_EQ(cells[5], "-300.0");
        EXPECT_NE(cells[4], "-300.0");
        ++rows;
    }
    EXPECT_EQ(rows, std::size_t(back.rows()));
    EXPECT_THROW(load_rdm((dir / "absent").string()), IoError);
}

TEST(Runner, ByteIdenticalAcrossThreadCounts)
{
    const Scenario s =
        parse(std::string(small_scenario) + "[sweep]\nvariable = sic.epsilon_rho_db\nvalues = -15, -25\n");
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    RunOptions oa, ob;
    oa.out = a.string();
    ob.out = b.string();
    ob.threads = 2;
    run_scenario(s, oa);
    run_scenario(s, ob);
    for (const char *f : {"pd_curve.csv", "rmse.csv", "se.csv", "complexity.csv", "rdm/point_0.bin", "rdm/point_1.csv"})
    {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_TRUE(fs::exists(a / "manifest.json"));
}

TEST(Runner, SeedsDifferPerPointAndTrial)
{
    EXPECT_NE(trial_seed(1, 0, 0), trial_seed(1, 0, 1));
    EXPECT_NE(trial_seed(1, 0, 0), trial_seed(1, 1, 0));
    EXPECT_NE(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
    EXPECT_EQ(trial_seed(9, 3, 4), trial_seed(9, 3, 4));
}

TEST(Runner, NoTargetsGivesZeroDetectionAndEmptyRmse)
{
    const Scenario s = parse(R"([frame]
afdm.n_r = 128
afdm.m_r = 16
afdm.l_cpp = 64
afdm.c1 = 3/128
ofdm.n_c = 256
ofdm.m_c = 32
ofdm.l_cp = 16
[channel]
noise_variance = 1
si_db = 20
[pctd]
gates = 32
[run]
trials = 1
)");
    const fs::path d = scratch("empty");
    RunOptions o;
    o.out = d.string();
    run_scenario(s, o);
    std::ifstream pd(d / "pd_curve.csv");
    std::string header, row;
    std::getline(pd, header);
    std::getline(pd, row);
    std::vector<std::string> h, r;
    for (std::stringstream ls(header); std::getline(ls, header, ',');)
        h.push_back(header);
    for (std::stringstream ls(row); std::getline(ls, row, ',');)
        r.push_back(row);
    const auto col = [&](const std::string &name) {
        return std::size_t(std::find(h.begin(), h.end(), name) - h.begin());
    };
    ASSERT_LT(col("p_d"), r.size());
    EXPECT_EQ(r[col("p_d")], "0");
    EXPECT_EQ(r[col("targets")], "0");

    std::ifstream rm(d / "rmse.csv");
    std::getline(rm, header);
    std::getline(rm, row);
    EXPECT_NE(row.find("mean_abs,,,0,0"), std::string::npos) << row;
}

TEST(Cli, ExitCodes)
{
    const fs::path d = scratch("cli");
    {
        std::ofstream f(d / "bad.scn");
        f << "frame.n_g = 1\nwhat = 2\n";
    }
    {
        std::ofstream f(d / "ok.scn");
        f << small_scenario;
    }
    EXPECT_EQ(run_cli("validate " + (d / "ok.scn").string()), 0);
    EXPECT_EQ(run_cli("validate " + (d / "bad.scn").string()), 2);
    EXPECT_EQ(run_cli("run " + (d / "missing.scn").string()), 2);
    EXPECT_EQ(run_cli("oracle nope"), 2);
    EXPECT_EQ(run_cli("oracle marcum"), 0);
    EXPECT_EQ(run_cli("--bogus"), 2);
    EXPECT_EQ(run_cli("run " + (d / "ok.scn").string() + " --trials 1 --out " + (d / "out").string()), 0);
    EXPECT_TRUE(fs::exists(d / "out" / "pd_curve.csv"));
    // output directory that cannot be created
    EXPECT_EQ(run_cli("run " + (d / "ok.scn").string() + " --trials 1 --out /proc/afisac"), 3);
}
