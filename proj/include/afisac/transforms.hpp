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

#include "fft.hpp"
#include "types.hpp"

namespace afisac
{
    struct DaftParams
    {
        std::size_t n = 1;
        Rational c1;
        Rational c2;

        DaftParams() = default;
        DaftParams(std::size_t n_, Rational c1_, Rational c2_) : n(n_), c1(c1_), c2(c2_) {}

        // 2 n c1 as an exact integer; throws if not integral.
        std::int64_t two_n_c1() const
        {
            std::int64_t t = 2 * std::int64_t(n) * c1.num;
            if (t % c1.den != 0)
                throw ConfigError("2*n*c1 must be an integer (n=" + std::to_string(n) + ", c1=" + c1.str() + ")");
            return t / c1.den;
        }

        void validate() const
        {
            if (n < 1)
                throw ConfigError("DAFT size must be >= 1");
            if (c1.num < 0 || c2.num < 0)
                throw ConfigError("c1 and c2 must be non-negative");
            two_n_c1();
        }
    };

    // exp(sign * j 2 pi c n^2) for n = 0..N-1, phase reduced exactly.
    inline cvec quadratic_phase(std::size_t N, const Rational &c, double sign)
    {
        cvec p(N, cplx(1.0, 0.0));
        if (c.is_zero())
            return p;
        for (std::size_t i = 0; i < N; ++i)
        {
            double f = c.frac_times(std::uint64_t(i) * std::uint64_t(i));
            p[i] = std::polar(1.0, sign * 2.0 * pi * f);
        }
        return p;
    }

    inline Signal dft(const Signal &x)
    {
        if (x.size() == 0)
            throw DimensionError("dft: empty input");
        return Signal(fft_unitary(x.samples), Domain::Frequency);
    }

    inline Signal idft(const Signal &X)
    {
        if (X.size() == 0)
            throw DimensionError("idft: empty input");
        return Signal(ifft_unitary(X.samples), Domain::Time);
    }

    // y = Lambda_c2 F Lambda_c1 x with Lambda_c = diag(exp(-j 2 pi c n^2)).
    inline cvec daft(const cvec &x, const DaftParams &p)
    {
        if (x.size() != p.n)
            throw DimensionError("daft: length " + std::to_string(x.size()) + " != n " + std::to_string(p.n));
        p.validate();
        cvec t(x);
        if (!p.c1.is_zero())
        {
            cvec ph = quadratic_phase(p.n, p.c1, -1.0);
            for (std::size_t i = 0; i < p.n; ++i)
                t[i] *= ph[i];
        }
        cvec y = fft_unitary(t);
        if (!p.c2.is_zero())
        {
            cvec ph = quadratic_phase(p.n, p.c2, -1.0);
            for (std::size_t i = 0; i < p.n; ++i)
                y[i] *= ph[i];
        }
        return y;
    }

    inline cvec idaft(const cvec &y, const DaftParams &p)
    {
        if (y.size() != p.n)
            throw DimensionError("idaft: length " + std::to_string(y.size()) + " != n " + std::to_string(p.n));
        p.validate();
        cvec t(y);
        if (!p.c2.is_zero())
        {
            cvec ph = quadratic_phase(p.n, p.c2, 1.0);
            for (std::size_t i = 0; i < p.n; ++i)
                t[i] *= ph[i];
        }
        cvec x = ifft_unitary(t);
        if (!p.c1.is_zero())
        {
            cvec ph = quadratic_phase(p.n, p.c1, 1.0);
            for (std::size_t i = 0; i < p.n; ++i)
                x[i] *= ph[i];
        }
        return x;
    }

    inline Signal daft(const Signal &x, const DaftParams &p)
    {
        require_domain(x, Domain::Time, "daft");
        return Signal(daft(x.samples, p), Domain::Affine);
    }

    inline Signal idaft(const Signal &y, const DaftParams &p)
    {
        require_domain(y, Domain::Affine, "idaft");
        return Signal(idaft(y.samples, p), Domain::Time);
    }

    // O(N^2) literal kernel sum, kept as a test oracle.
    inline cvec daft_direct(const cvec &x, const DaftParams &p)
    {
        if (x.size() != p.n)
            throw DimensionError("daft_direct: length mismatch");
        p.validate();
        const std::size_t N = p.n;
        const long double c1 = (long double)p.c1.num / p.c1.den;
        const long double c2 = (long double)p.c2.num / p.c2.den;
        cvec y(N);
        for (std::size_t m = 0; m < N; ++m)
        {
            std::complex<long double> acc = 0;
            for (std::size_t n = 0; n < N; ++n)
            {
                long double ph = c1 * (long double)(n * n) + (long double)((n * m) % N) / N + c2 * (long double)(m * m);
                ph -= std::floor(ph);
                acc += std::complex<long double>(x[n].real(), x[n].imag()) *
                       std::polar(1.0L, -2.0L * std::numbers::pi_v<long double> * ph);
            }
            acc /= std::sqrt((long double)N);
            y[m] = cplx(double(acc.real()), double(acc.imag()));
        }
        return y;
    }

    inline cvec idaft_direct(const cvec &y, const DaftParams &p)
    {
        if (y.size() != p.n)
            throw DimensionError("idaft_direct: length mismatch");
        p.validate();
        const std::size_t N = p.n;
        const long double c1 = (long double)p.c1.num / p.c1.den;
        const long double c2 = (long double)p.c2.num / p.c2.den;
        cvec x(N);
        for (std::size_t n = 0; n < N; ++n)
        {
            std::complex<long double> acc = 0;
            for (std::size_t m = 0; m < N; ++m)
            {
                long double ph = c1 * (long double)(n * n) + (long double)((n * m) % N) / N + c2 * (long double)(m * m);
                ph -= std::floor(ph);
                acc += std::complex<long double>(y[m].real(), y[m].imag()) *
                       std::polar(1.0L, 2.0L * std::numbers::pi_v<long double> * ph);
            }
            acc /= std::sqrt((long double)N);
            x[n] = cplx(double(acc.real()), double(acc.imag()));
        }
        return x;
    }

    inline Signal daft_direct(const Signal &x, const DaftParams &p)
    {
        require_domain(x, Domain::Time, "daft_direct");
        return Signal(daft_direct(x.samples, p), Domain::Affine);
    }
}
