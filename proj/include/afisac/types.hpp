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

#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace afisac
{
    using cplx = std::complex<double>;
    using cvec = std::vector<cplx>;
    using rvec = std::vector<double>;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0;

    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class DimensionError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class NumericError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class Domain
    {
        Time,
        Affine,
        Frequency
    };

    inline const char *domain_name(Domain d)
    {
        switch (d)
        {
        case Domain::Time:
            return "time";
        case Domain::Affine:
            return "affine";
        default:
            return "frequency";
        }
    }

    struct Signal
    {
        cvec samples;
        Domain domain = Domain::Time;

        Signal() = default;
        Signal(cvec s, Domain d) : samples(std::move(s)), domain(d) {}

        std::size_t size() const { return samples.size(); }
        cplx &operator[](std::size_t i) { return samples[i]; }
        const cplx &operator[](std::size_t i) const { return samples[i]; }
    };

    inline void require_domain(const Signal &s, Domain d, const char *op)
    {
        if (s.domain != d)
            throw DimensionError(std::string(op) + ": expected " + domain_name(d) + "-domain input, got " + domain_name(s.domain));
    }

    // Exact non-negative rational, used for the chirp coefficients.
    struct Rational
    {
        std::int64_t num = 0;
        std::int64_t den = 1;

        Rational() = default;
        Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d)
        {
            if (den == 0)
                throw ConfigError("rational with zero denominator");
            if (den < 0)
            {
                num = -num;
                den = -den;
            }
            std::int64_t g = std::gcd(num < 0 ? -num : num, den);
            if (g > 1)
            {
                num /= g;
                den /= g;
            }
        }

        double value() const { return double(num) / double(den); }
        bool is_zero() const { return num == 0; }
        bool operator==(const Rational &o) const { return num == o.num && den == o.den; }

        // Fractional part of this * k, for exact quadratic phases: returns (num * k mod den) / den.
        double frac_times(std::uint64_t k) const
        {
            std::uint64_t d = std::uint64_t(den);
            std::uint64_t r = (std::uint64_t(num < 0 ? -num : num) % d) * (k % d) % d;
            double f = double(r) / double(den);
            return num < 0 ? -f : f;
        }

        std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
    };

    // Parses "3/128", "0", "0.5" is rejected; integers accepted.
    inline Rational parse_rational(const std::string &s)
    {
        auto slash = s.find('/');
        try
        {
            std::size_t pos = 0;
            if (slash == std::string::npos)
            {
                std::int64_t v = std::stoll(s, &pos);
                if (pos != s.size())
                    throw ConfigError("bad rational '" + s + "'");
                return Rational(v, 1);
            }
            std::string a = s.substr(0, slash), b = s.substr(slash + 1);
            std::size_t pa = 0, pb = 0;
            std::int64_t n = std::stoll(a, &pa), d = std::stoll(b, &pb);
            if (pa != a.size() || pb != b.size())
                throw ConfigError("bad rational '" + s + "'");
            return Rational(n, d);
        }
        catch (const std::logic_error &)
        {
            throw ConfigError("bad rational '" + s + "'");
        }
    }

    inline double energy(const cvec &x)
    {
        double e = 0.0;
        for (const auto &v : x)
            e += std::norm(v);
        return e;
    }

    inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
    inline double lin_to_db(double x) { return 10.0 * std::log10(x); }
}
