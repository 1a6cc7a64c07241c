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
    Signal affine(cvec v) { return Signal(std::move(v), Domain::Affine); }
}

TEST(Kaiser, MatchesClosedForm)
{
    const rvec w = kaiser_window(33, 5.0);
    ASSERT_EQ(w.size(), 33u);
    EXPECT_DOUBLE_EQ(w[16], 1.0);
    for (std::size_t m = 0; m < 33; ++m)
    {
        const double t = (double(m) - 16.0) / 16.0;
        EXPECT_NEAR(w[m], std::cyl_bessel_i(0.0, 5.0 * std::sqrt(1.0 - t * t)) / std::cyl_bessel_i(0.0, 5.0), 1e-14);
        EXPECT_NEAR(w[m], w[32 - m], 1e-15);
    }
    EXPECT_NEAR(w[0], 1.0 / std::cyl_bessel_i(0.0, 5.0), 1e-15);
    EXPECT_EQ(kaiser_window(8, 0.0), rvec(8, 1.0));
    EXPECT_THROW(kaiser_window(0, 1.0), DimensionError);
}

TEST(Kaiser, MaskEqualsBruteForceMax)
{
    Rng rng(21);
    std::uniform_int_distribution<std::size_t> pick(0, 299);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::set<std::size_t> s;
        const std::size_t np = 1 + trial % 7;
        while (s.size() < np)
            s.insert(pick(rng));
        const std::vector<std::size_t> peaks(s.begin(), s.end());
        const rvec w = kaiser_window(20 + 2 * std::size_t(trial % 5) + trial % 2, 3.0);
        const std::size_t lo = 10, hi = 280;
        const rvec g = detail::window_mask(peaks, w, 300, lo, hi);
        const std::int64_t c = std::int64_t(w.size() / 2);
        for (std::size_t m = 0; m < 300; ++m)
        {
            double want = 0.0;
            if (m >= lo && m < hi)
                for (std::size_t p : peaks)
                {
                    const std::int64_t i = std::int64_t(m) - std::int64_t(p) + c;
                    if (i >= 0 && i < std::int64_t(w.size()))
                        want = std::max(want, w[std::size_t(i)]);
                }
            ASSERT_EQ(g[m], want) << "m=" << m;
        }
    }
}

TEST(Subtract, PerfectKnowledgeRemovesSi)
{
    Rng rng(22);
    const DaftParams p(96, Rational(1, 96), Rational(0));
    const Signal rep(random_cvec(96, rng), Domain::Time);
    const cplx beta(30.0, -12.0);
    cvec rx(96);
    const cvec echo = random_cvec(96, rng, 0.01);
    for (std::size_t n = 0; n < 96; ++n)
        rx[n] = beta * rep[n] + echo[n];
    const Signal y = daft(Signal(rx, Domain::Time), p);
    EXPECT_LT(max_abs_diff(subtract_si(y, rep, beta, 0.0, p).samples, daft(echo, p)), 1e-10);

    // eps leaves exactly eps * beta * replica behind
    const Signal r = subtract_si(y, rep, beta, 0.1, p);
    cvec want = daft(echo, p);
    const cvec drep = daft(rep.samples, p);
    for (std::size_t i = 0; i < 96; ++i)
        want[i] += 0.1 * beta * drep[i];
    EXPECT_LT(max_abs_diff(r.samples, want), 1e-9);
    EXPECT_THROW(subtract_si(Signal(rx, Domain::Time), rep, beta, 0.0, p), DimensionError);
}

TEST(Windowing, SinglePeakLocksSpan)
{
    cvec y(400, 0.0);
    y[200] = 10.0;
    y[195] = 0.5;
    SicConfig cfg;
    cfg.scale = ThresholdScale::Absolute;
    cfg.zeta1 = 4.0;
    cfg.n_w = 41;
    cfg.n_w_iter = 21;
    const SicResult r = iterative_windowing(affine(y), cfg, 20);
    EXPECT_EQ(r.m_lo, 180u);
    EXPECT_EQ(r.m_hi, 221u);
    EXPECT_EQ(r.n_s, 41u);
    EXPECT_TRUE(r.converged);
    ASSERT_EQ(r.peak_indices.front(), std::vector<std::size_t>{200});
    EXPECT_DOUBLE_EQ(r.cleaned[20].real(), 10.0);
    EXPECT_NEAR(std::abs(r.cleaned[15]), 0.5 * kaiser_window(41, cfg.kaiser_beta)[15], 1e-15);

    const Signal full = restore_observation(r);
    EXPECT_EQ(full.size(), 400u);
    EXPECT_EQ(full[10], 0.0);
    EXPECT_EQ(full[200], r.cleaned[20]);
}

TEST(Windowing, SpanClampsAtEdges)
{
    cvec y(100, 0.0);
    y[3] = 5.0;
    y[97] = 5.0;
    SicConfig cfg;
    cfg.scale = ThresholdScale::Absolute;
    cfg.zeta1 = 1.0;
    cfg.n_w = 21;
    const SicResult r = iterative_windowing(affine(y), cfg, 10);
    EXPECT_EQ(r.m_lo, 0u);
    EXPECT_EQ(r.m_hi, 100u);
}

TEST(Windowing, NothingAboveThreshold)
{
    SicConfig cfg;
    cfg.scale = ThresholdScale::Absolute;
    cfg.zeta1 = 2.0;
    const SicResult r = iterative_windowing(affine(cvec(50, 1.0)), cfg, 10);
    EXPECT_EQ(r.iterations_used, 0u);
    EXPECT_EQ(r.n_s, 0u);
}

TEST(Windowing, IterationsShrinkPeakSet)
{
    // strong peak with a weaker neighbour cluster: later thresholds pick the cluster up
    cvec y(300, 0.0);
    y[150] = 16.0;
    y[140] = 3.0;
    y[160] = 1.5;
    SicConfig cfg;
    cfg.scale = ThresholdScale::Absolute;
    cfg.threshold_schedule = {8.0, 2.0, 1.0};
    cfg.n_w = 61;
    cfg.n_w_iter = 31;
    cfg.kaiser_beta = 0.0; // rectangular, so the peak values are untouched
    const SicResult r = iterative_windowing(affine(y), cfg, 30);
    ASSERT_GE(r.peak_indices.size(), 2u);
    EXPECT_EQ(r.peak_indices[0], std::vector<std::size_t>{150});
    EXPECT_EQ(r.peak_indices[1], (std::vector<std::size_t>{140, 150}));
    EXPECT_EQ(r.iterations_used, 3u);
}

TEST(Windowing, ConfigChecks)
{
    SicConfig cfg;
    cfg.threshold_schedule = {1.0, 2.0};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.threshold_schedule.clear();
    cfg.epsilon = 2.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.epsilon = 0.0;
    cfg.reduction = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(iterative_windowing(Signal(cvec(8), Domain::Time), SicConfig{}, 4), DimensionError);
}

TEST(Windowing, AnalyticScalesDisturbanceOnly)
{
    Rng rng(23);
    cvec e(200, 0.0);
    e[100] = 20.0;
    const cvec dist = random_cvec(200, rng);
    SicConfig cfg;
    cfg.scale = ThresholdScale::Absolute;
    cfg.zeta1 = 5.0;
    cfg.n_w = 51;
    cfg.epsilon_rho_db = -20.0;
    cfg.mode = ResidualMode::Analytic;
    const SicResult r = analytic_windowing(affine(e), affine(dist), cfg, 25);
    ASSERT_EQ(r.n_s, 51u);
    for (std::size_t i = 0; i < r.n_s; ++i)
        EXPECT_LT(std::abs(r.cleaned[i] - (e[r.m_lo + i] + 0.1 * dist[r.m_lo + i])), 1e-14);
}

TEST(Rayleigh, FloorTracksSigma)
{
    Rng rng(24);
    const cvec v = random_cvec(20000, rng, 2.0);
    EXPECT_NEAR(rayleigh_floor(v), 2.0, 0.05);
}
