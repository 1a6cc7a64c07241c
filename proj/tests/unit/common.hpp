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

#include <gtest/gtest.h>

#include <afisac/afisac.hpp>

namespace afisac::test
{
    inline cvec random_cvec(std::size_t n, Rng &rng, double sd = 1.0)
    {
        std::normal_distribution<double> g(0.0, sd / std::sqrt(2.0));
        cvec v(n);
        for (auto &x : v)
            x = cplx(g(rng), g(rng));
        return v;
    }

    inline double max_abs_diff(const cvec &a, const cvec &b)
    {
        EXPECT_EQ(a.size(), b.size());
        double m = 0.0;
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    }

    inline std::size_t argmax_abs(const cvec &v)
    {
        std::size_t k = 0;
        for (std::size_t i = 1; i < v.size(); ++i)
            if (std::abs(v[i]) > std::abs(v[k]))
                k = i;
        return k;
    }

    // Desk-scale frame shared by the pipeline tests: chirp-continuous CPP, small bursts.
    inline FrameConfig small_frame()
    {
        FrameConfig f;
        f.afdm.n_r = 128;
        f.afdm.m_r = 16;
        f.afdm.l_cpp = 64;
        f.afdm.c1 = Rational(3, 128);
        f.afdm.c2 = Rational(1, 128 * 128);
        f.ofdm.n_c = 256;
        f.ofdm.m_c = 32;
        f.ofdm.l_cp = 16;
        f.n_g = 32;
        return f;
    }
}
