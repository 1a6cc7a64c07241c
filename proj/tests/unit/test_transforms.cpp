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

TEST(Rational, ParsesAndReduces)
{
    EXPECT_EQ(parse_rational("6/256"), Rational(3, 128));
    EXPECT_EQ(parse_rational("0"), Rational(0));
    EXPECT_THROW(parse_rational("0.5"), ConfigError);
    EXPECT_THROW(parse_rational("1/0"), ConfigError);
    EXPECT_THROW(parse_rational("a/2"), ConfigError);
}

TEST(DaftParams, RejectsNonIntegerTwoNC1)
{
    EXPECT_NO_THROW(DaftParams(128, Rational(3, 128), Rational(0)).validate());
    EXPECT_THROW(DaftParams(128, Rational(1, 1000), Rational(0)).validate(), ConfigError);
    EXPECT_THROW(DaftParams(0, Rational(0), Rational(0)).validate(), ConfigError);
}

TEST(Daft, MatchesDirectSum)
{
    Rng rng(11);
    for (std::size_t N : {16, 64, 128})
    {
        const DaftParams p(N, Rational(3, std::int64_t(N)), Rational(1, std::int64_t(N * N)));
        for (int t = 0; t < 5; ++t)
        {
            const cvec x = random_cvec(N, rng);
            EXPECT_LT(max_abs_diff(daft(x, p), daft_direct(x, p)), 1e-9);
            EXPECT_LT(max_abs_diff(idaft(x, p), idaft_direct(x, p)), 1e-9);
        }
    }
}

TEST(Daft, RoundTripAndEnergy)
{
    Rng rng(12);
    const DaftParams p(200, Rational(1, 40), Rational(7, 13));
    const cvec x = random_cvec(200, rng);
    const cvec y = daft(x, p);
    EXPECT_LT(max_abs_diff(idaft(y, p), x), 1e-12);
    EXPECT_NEAR(energy(y), energy(x), 1e-9 * energy(x));
}

TEST(Daft, ReducesToDftWhenChirpRatesVanish)
{
    Rng rng(13);
    const cvec x = random_cvec(64, rng);
    const DaftParams p(64, Rational(0), Rational(0));
    EXPECT_EQ(daft(x, p), fft_unitary(x));
}

TEST(Daft, ImpulseInverseIsChirp)
{
    // y = impulse at m0 = 5, n = 64, c1 = 1/16.
    const DaftParams p(64, Rational(1, 16), Rational(0));
    cvec y(64, 0.0);
    y[5] = 1.0;
    const cvec x = idaft(y, p);
    EXPECT_LT(max_abs_diff(x, idaft_direct(y, p)), 1e-12);
    for (std::size_t n = 0; n < 64; ++n)
    {
        EXPECT_NEAR(std::abs(x[n]), 1.0 / 8.0, 1e-12);
        const double ph = std::fmod((double(n * n) / 16.0 + double(5 * n) / 64.0), 1.0);
        EXPECT_LT(std::abs(x[n] - std::polar(1.0 / 8.0, 2.0 * pi * ph)), 1e-12);
    }
}

TEST(Daft, DomainTagsAreChecked)
{
    const DaftParams p(8, Rational(0), Rational(0));
    Signal t(cvec(8, 1.0), Domain::Time);
    EXPECT_THROW(idaft(t, p), DimensionError);
    EXPECT_EQ(daft(t, p).domain, Domain::Affine);
    EXPECT_THROW(daft(cvec(7, 0.0), p), DimensionError);
}

// Delay by l (with the chirp-periodic phase on the wrapped samples) moves a single carrier by
// -2 N c1 l, and Doppler kappa moves it by +kappa.
TEST(Daft, ShiftTheorem)
{
    const std::size_t N = 128, m0 = 17;
    const DaftParams p(N, Rational(3, 128), Rational(0));
    cvec x(N, 0.0);
    x[m0] = 1.0;
    const cvec s = idaft(x, p);
    for (std::size_t l : {1, 4, 10})
    {
        cvec r(N);
        for (std::size_t n = 0; n < N; ++n)
        {
            const std::int64_t k = std::int64_t(n) - std::int64_t(l);
            cplx v = s[std::size_t((k + std::int64_t(N)) % std::int64_t(N))];
            if (k < 0)
                v *= std::polar(1.0, -2.0 * pi * frac_signed(p.c1, std::int64_t(N) * (std::int64_t(N) + 2 * k)));
            r[n] = v;
        }
        const cvec y = daft(r, p);
        const std::size_t want = (m0 + N * 8 - 6 * l) % N;
        EXPECT_EQ(argmax_abs(y), want);
        EXPECT_NEAR(std::abs(y[want]), 1.0, 1e-9);
    }
    for (std::int64_t kap : {1, 3})
    {
        cvec r(s);
        for (std::size_t n = 0; n < N; ++n)
            r[n] *= std::polar(1.0, 2.0 * pi * double(kap) * double(n) / double(N));
        EXPECT_EQ(argmax_abs(daft(r, p)), (m0 + std::size_t(kap)) % N);
    }
}
