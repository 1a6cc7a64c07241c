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

using namespace afisac;
using namespace afisac::test;

namespace
{
    // Q1(a, b) = int_b^inf x exp(-(x^2 + a^2)/2) I0(a x) dx by composite Simpson.
    double marcum_quadrature(double a, double b)
    {
        const double hi = std::max(a, b) + 40.0;
        const std::size_t n = 200000;
        const double h = (hi - b) / double(n);
        auto f = [a](double x) { return x * std::exp(-0.5 * (x * x + a * a)) * std::cyl_bessel_i(0.0, a * x); };
        double s = f(b) + f(hi);
        for (std::size_t i = 1; i < n; ++i)
            s += f(b + h * double(i)) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    }
}

TEST(Marcum, MatchesQuadrature)
{
    for (auto [a, b] : {std::pair{0.5, 0.5}, {1.0, 1.0}, {2.0, 3.0}, {3.0, 2.0}, {4.5, 5.2565}, {8.0, 5.0}, {10.0, 12.0}})
        EXPECT_NEAR(marcum_q1(a, b), marcum_quadrature(a, b), 1e-8) << a << "," << b;
}

TEST(Marcum, EdgeCases)
{
    EXPECT_DOUBLE_EQ(marcum_q1(3.0, 0.0), 1.0);
    EXPECT_NEAR(marcum_q1(0.0, 1.0), std::exp(-0.5), 1e-15);
    EXPECT_THROW(marcum_q1(-1.0, 1.0), ConfigError);
}

TEST(Marcum, DetectionProbability)
{
    EXPECT_NEAR(pd_analytic(0.0, 1e-6), 1e-6, 1e-12);
    double prev = 0.0;
    for (double g = -10.0; g <= 25.0; g += 0.5)
    {
        const double pd = pd_analytic(db_to_lin(g), 1e-6);
        EXPECT_GE(pd, prev - 1e-12);
        prev = pd;
    }
    EXPECT_GT(prev, 0.999999);
    EXPECT_THROW(pd_analytic(1.0, 0.0), ConfigError);
    EXPECT_THROW(pd_analytic(-1.0, 0.1), ConfigError);
}

TEST(Sinr, TermsByHand)
{
    LinkBudget b;
    b.p_r = 10.0;
    b.p_c = 1.0;
    b.eps = 1e-3;
    b.eps_rho = 0.1;
    b.n0_w = 4e-12;
    b.path_terms = 1e-12;
    b.n_s = 512;
    b.n_r = 128;
    b.n_c = 256;
    const SinrTerms t = sinr_terms(b);
    EXPECT_DOUBLE_EQ(t.radar, 1e-12 * 512 * 128 * 10.0);
    EXPECT_DOUBLE_EQ(t.si, 0.01 * 1e-6 * 512 * 256);
    EXPECT_DOUBLE_EQ(t.noise, 0.01 * 4e-12);
    EXPECT_DOUBLE_EQ(t.sinr, t.radar / (t.si + t.noise));
    b.eps = 0.0;
    EXPECT_THROW(sinr(b), ConfigError);
}

TEST(SpectralEfficiency, DefaultFrameCounts)
{
    const FrameConfig f;
    PilotLayout one;
    one.n_pilots = 1;
    one.guard_size = 0;
    const SeBreakdown a = se_breakdown(f, one, 0, 1.0);
    EXPECT_EQ(a.n_r_eff, 4064);
    EXPECT_EQ(a.n_r_eff + a.n_c_eff, 69600);
    EXPECT_EQ(a.n_tot, 74304);
    EXPECT_EQ(a.m_conv, 136);
    EXPECT_EQ(a.conv_eff, 69632);
    EXPECT_EQ(a.conv_tot, 73984);
    EXPECT_DOUBLE_EQ(a.eta, 69600.0 / 74304.0);

    PilotLayout many;
    many.n_pilots = 16;
    many.guard_size = 2;
    const SeBreakdown b = se_breakdown(f, many, 0, 3.0);
    EXPECT_EQ(b.n_r_eff, 2560);
    EXPECT_DOUBLE_EQ(b.eta, 68096.0 / 74304.0 * 2.0);
    EXPECT_LT(b.eta, a.eta * 2.0);
    EXPECT_THROW(se_breakdown(f, one, 0, -1.0), ConfigError);
}

TEST(Complexity, HandExpansion)
{
    const ComplexityRecord c = complexity_terms(1000, 300, 150, {3, 2, 1}, 256, 32);
    EXPECT_DOUBLE_EQ(c.o1, 1000.0 * std::log2(1000.0));
    EXPECT_DOUBLE_EQ(c.o2, 300.0 * 3 + 150.0 * (2 + 1));
    EXPECT_DOUBLE_EQ(c.o3, 2.0 * 256 * 8 + 2.0 * 32 * 5);
    EXPECT_DOUBLE_EQ(c.total, c.o1 + c.o2 + c.o3);
    EXPECT_EQ(complexity_terms(8, 4, 2, {}, 0, 0).o2, 0.0);
}

TEST(Complexity, DoublingZeroPadAddsKnownAmount)
{
    for (std::size_t n : {16, 32, 64, 128})
    {
        const ComplexityRecord a = complexity_terms(100, 10, 5, {1}, 64, n);
        const ComplexityRecord b = complexity_terms(100, 10, 5, {1}, 64, 2 * n);
        const double x = double(n);
        EXPECT_NEAR(b.o3 - a.o3, 2.0 * (2.0 * x * (std::log2(x) + 1.0) - x * std::log2(x)), 1e-9);
        EXPECT_EQ(a.o1, b.o1);
        EXPECT_EQ(a.o2, b.o2);
    }
}

TEST(Rmse, MeanAbsoluteAndConventional)
{
    const RmseReport r = rmse({EstimatePoint{103.0, 1.0}, EstimatePoint{204.0, -1.0}, std::nullopt},
                              {{100.0, 0.0}, {200.0, 0.0}, {300.0, 0.0}});
    EXPECT_DOUBLE_EQ(r.range_rmse_m, 3.5);
    EXPECT_DOUBLE_EQ(r.range_rmse_conv_m, std::sqrt(12.5));
    EXPECT_DOUBLE_EQ(r.velocity_rmse_mps, 1.0);
    EXPECT_EQ(r.associated, 2u);
    EXPECT_EQ(r.misses, 1u);
    EXPECT_THROW(rmse({std::nullopt}, {}), DimensionError);
    const RmseReport none = rmse({std::nullopt}, {{1.0, 1.0}});
    EXPECT_EQ(none.associated, 0u);
}

TEST(Associate, GreedyNearestInsideGate)
{
    std::vector<Detection> d(3);
    d[0].range_m = 101.0;
    d[1].range_m = 99.5;
    d[2].range_m = 180.0;
    const std::vector<EstimatePoint> t{{100.0, 0.0}, {150.0, 0.0}, {100.4, 0.0}};
    const std::vector<int> a = associate(d, t, 2.0, 1.0);
    EXPECT_EQ(a[0], 1);
    EXPECT_EQ(a[1], -1);
    EXPECT_EQ(a[2], 0);
}

TEST(Whiteness, GaussianPassesOffsetFails)
{
    const DaftParams p(64, Rational(1, 64), Rational(0));
    Rng rng(41);
    std::vector<Signal> white, offset;
    for (int t = 0; t < 400; ++t)
    {
        white.emplace_back(random_cvec(64, rng), Domain::Time);
        cvec v = random_cvec(64, rng);
        for (auto &x : v)
            x += 0.5;
        offset.emplace_back(std::move(v), Domain::Time);
    }
    EXPECT_TRUE(affine_whiteness_report(white, p).pass());
    const StatReport bad = affine_whiteness_report(offset, p);
    EXPECT_FALSE(bad.mean_pass);
    EXPECT_THROW(affine_whiteness_report(std::vector<Signal>(white.begin(), white.begin() + 50), p), ConfigError);
}

TEST(MannKendall, ExactAndNormal)
{
    const MannKendall up = mann_kendall({1, 2, 3, 4, 5});
    EXPECT_TRUE(up.exact);
    EXPECT_EQ(up.s, 10.0);
    EXPECT_NEAR(up.p_increasing, 1.0 / 120.0, 1e-15);
    EXPECT_NEAR(up.p_decreasing, 1.0, 1e-15);

    std::vector<double> x(10);
    for (std::size_t i = 0; i < 10; ++i)
        x[i] = -double(i);
    const MannKendall dn = mann_kendall(x);
    EXPECT_FALSE(dn.exact);
    EXPECT_EQ(dn.s, -45.0);
    EXPECT_NEAR(dn.z, -44.0 / std::sqrt(125.0), 1e-12);
    EXPECT_LT(dn.p_decreasing, 1e-4);
    EXPECT_THROW(mann_kendall({1, 2}), ConfigError);
}
