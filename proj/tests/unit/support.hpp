// SPDX-License-Identifier: Apache-2.0
//
// risce: mutual-coupling-aware channel estimation for RIS-aided mmWave links
// Copyright (C) 2026 The risce Authors
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

#include "risce/types.hpp"

#include <algorithm>
#include <vector>

namespace risce::test
{

inline double rel(const CMat &a, const CMat &b)
{
    const double n = b.norm();
    return n == 0.0 ? a.norm() : (a - b).norm() / n;
}

inline CMat random_complex(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
    CMat A(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            A(i, j) = complex_normal(rng, 1.0);
    return A;
}

inline CVec random_phases(Eigen::Index n, Rng &rng)
{
    std::uniform_real_distribution<double> u(-kPi, kPi);
    CVec g(n);
    for (Eigen::Index i = 0; i < n; ++i)
        g(i) = std::polar(1.0, u(rng));
    return g;
}

inline double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace risce::test
