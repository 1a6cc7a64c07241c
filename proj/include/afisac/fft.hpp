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

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "types.hpp"

namespace afisac
{
    namespace detail
    {
        // FFTW planning is not thread-safe, execution with new arrays is.
        class PlanCache
        {
        public:
            static PlanCache &instance()
            {
                static PlanCache cache;
                return cache;
            }

            fftw_plan get(int n, int sign)
            {
                std::lock_guard<std::mutex> lock(mtx_);
                auto key = std::make_pair(n, sign);
                auto it = plans_.find(key);
                if (it != plans_.end())
                    return it->second;
                fftw_complex *in = fftw_alloc_complex(std::size_t(n));
                fftw_complex *out = fftw_alloc_complex(std::size_t(n));
                fftw_plan p = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
                fftw_free(in);
                fftw_free(out);
                if (!p)
                    throw NumericError("fftw plan creation failed for n=" + std::to_string(n));
                plans_.emplace(key, p);
                return p;
            }

            ~PlanCache()
            {
                for (auto &kv : plans_)
                    fftw_destroy_plan(kv.second);
            }

        private:
            std::mutex mtx_;
            std::map<std::pair<int, int>, fftw_plan> plans_;
        };

        inline void fft_raw(const cplx *in, cplx *out, std::size_t n, int sign)
        {
            fftw_plan p = PlanCache::instance().get(int(n), sign);
            fftw_execute_dft(p, reinterpret_cast<fftw_complex *>(const_cast<cplx *>(in)),
                             reinterpret_cast<fftw_complex *>(out));
        }
    }

    // Unit-normalized forward DFT: X[k] = 1/sqrt(N) sum x[n] exp(-j 2 pi n k / N).
    inline cvec fft_unitary(const cvec &x)
    {
        cvec y(x.size());
        if (x.empty())
            return y;
        detail::fft_raw(x.data(), y.data(), x.size(), FFTW_FORWARD);
        const double s = 1.0 / std::sqrt(double(x.size()));
        for (auto &v : y)
            v *= s;
        return y;
    }

    // Unit-normalized inverse DFT.
    inline cvec ifft_unitary(const cvec &x)
    {
        cvec y(x.size());
        if (x.empty())
            return y;
        detail::fft_raw(x.data(), y.data(), x.size(), FFTW_BACKWARD);
        const double s = 1.0 / std::sqrt(double(x.size()));
        for (auto &v : y)
            v *= s;
        return y;
    }
}
