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
#include "risce/array_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace risce
{

void UpaGeometry::validate() const
{
    if (count_h < 1 || count_v < 1)
        throw ConfigError("array element counts must be positive");
    if (!(spacing > 0.0) || spacing > 0.5)
        throw ConfigError("element spacing must lie in (0, 0.5] wavelengths");
}

CVec steering_1d(int count, double freq)
{
    CVec a(count);
    for (int n = 0; n < count; ++n)
        a(n) = std::polar(1.0, -2.0 * kPi * n * freq);
    return a;
}

CVec steering_vector(const UpaGeometry &geom, SpatialAngle angle)
{
    const CVec av = steering_1d(geom.count_v, angle.z);
    const CVec ah = steering_1d(geom.count_h, angle.y);
    CVec a(geom.size());
    for (int v = 0; v < geom.count_v; ++v)
        a.segment(v * geom.count_h, geom.count_h) = av(v) * ah;
    return a;
}

CMat steering_matrix(const UpaGeometry &geom, std::span<const SpatialAngle> angles)
{
    CMat A(geom.size(), static_cast<Eigen::Index>(angles.size()));
    for (std::size_t l = 0; l < angles.size(); ++l)
        A.col(static_cast<Eigen::Index>(l)) = steering_vector(geom, angles[l]);
    return A;
}

void ChannelRealization::validate() const
{
    const auto L = bs_aoas.size();
    if (L == 0 || ris_aods.size() != L || ris_bs_gains.size() != L)
        throw ShapeMismatch("realization: path lists of the RIS-BS link disagree");
    for (const auto &u : users)
        if (u.aoas.empty() || u.aoas.size() != u.gains.size())
            throw ShapeMismatch("realization: user path lists disagree");
    auto finite = [](cd g) { return std::isfinite(g.real()) && std::isfinite(g.imag()); };
    if (!std::all_of(ris_bs_gains.begin(), ris_bs_gains.end(), finite))
        throw Error("realization: non-finite gain");
    for (const auto &u : users)
        if (!std::all_of(u.gains.begin(), u.gains.end(), finite))
            throw Error("realization: non-finite gain");
}

double ChannelStatistics::variance_bs_ris() const
{
    return gain_reference * std::pow(distance_bs_ris, -exponent_bs_ris);
}

double ChannelStatistics::variance_ris_user() const
{
    return gain_reference * std::pow(distance_ris_user, -exponent_ris_user);
}

namespace
{

// Draws `count` distinct indices out of [0, size).
std::vector<int> distinct_indices(int count, int size, Rng &rng)
{
    if (count > size)
        throw ConfigError("on-grid sampling needs at least as many grid points as paths");
    std::vector<int> pool(static_cast<std::size_t>(size));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < count; ++i)
    {
        std::uniform_int_distribution<int> pick(i, size - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
}

double grid_freq(int g, int size, double spacing) { return (-1.0 + 2.0 * g / size) * spacing; }

std::vector<SpatialAngle> draw_angles(int count, double spacing, bool on_grid, int grid_v,
                                      int grid_h, Rng &rng)
{
    std::vector<SpatialAngle> out(static_cast<std::size_t>(count));
    if (on_grid)
    {
        const auto iz = distinct_indices(count, grid_v, rng);
        const auto iy = distinct_indices(count, grid_h, rng);
        for (int i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] = {grid_freq(iz[static_cast<std::size_t>(i)], grid_v, spacing),
                                                grid_freq(iy[static_cast<std::size_t>(i)], grid_h, spacing)};
        return out;
    }
    std::uniform_real_distribution<double> uni(-spacing, spacing);
    for (auto &a : out)
    {
        a.z = uni(rng);
        a.y = uni(rng);
    }
    return out;
}

} // namespace

ChannelRealization sample_realization(const ChannelStatistics &stats, Rng &rng)
{
    if (!(stats.distance_bs_ris > 0.0) || !(stats.distance_ris_user > 0.0))
        throw ConfigError("link distances must be positive");
    if (stats.paths_L < 1)
        throw ConfigError("paths_L must be positive");

    ChannelRealization r;
    const int L = stats.paths_L;
    r.bs_aoas = draw_angles(L, stats.bs.spacing, stats.on_grid, stats.bs.count_v, stats.bs.count_h, rng);
    r.ris_aods = draw_angles(L, stats.ris.spacing, stats.on_grid, stats.ris_grid_v, stats.ris_grid_h, rng);
    const double va = stats.variance_bs_ris();
    for (int l = 0; l < L; ++l)
        r.ris_bs_gains.push_back(complex_normal(rng, va));

    const double vb = stats.variance_ris_user();
    for (int J : stats.paths_J)
    {
        if (J < 1)
            throw ConfigError("paths_J entries must be positive");
        UserPaths u;
        u.aoas = draw_angles(J, stats.ris.spacing, stats.on_grid, stats.ris_grid_v, stats.ris_grid_h, rng);
        for (int j = 0; j < J; ++j)
            u.gains.push_back(complex_normal(rng, vb));
        r.users.push_back(std::move(u));
    }
    return r;
}

CMat build_ris_bs_channel(const UpaGeometry &bs, const UpaGeometry &ris,
                          const ChannelRealization &realization)
{
    realization.validate();
    const CMat AN = steering_matrix(bs, realization.bs_aoas);
    const CMat AM = steering_matrix(ris, realization.ris_aods);
    const CVec alpha = Eigen::Map<const CVec>(realization.ris_bs_gains.data(),
                                              static_cast<Eigen::Index>(realization.ris_bs_gains.size()));
    return AN * alpha.asDiagonal() * AM.adjoint();
}

CVec build_user_ris_channel(const UpaGeometry &ris, const ChannelRealization &realization,
                            int user_index)
{
    if (user_index < 0 || user_index >= static_cast<int>(realization.users.size()))
        throw ShapeMismatch("user index out of range");
    const auto &u = realization.users[static_cast<std::size_t>(user_index)];
    if (u.aoas.empty() || u.aoas.size() != u.gains.size())
        throw ShapeMismatch("user path lists disagree");
    const CMat A = steering_matrix(ris, u.aoas);
    const CVec beta = Eigen::Map<const CVec>(u.gains.data(), static_cast<Eigen::Index>(u.gains.size()));
    return A * beta;
}

CVec cascaded_channel(const CMat &H, const CMat &ris_response, const CVec &h)
{
    if (H.cols() != ris_response.rows() || ris_response.cols() != h.size())
        throw ShapeMismatch("cascaded_channel: inconsistent shapes");
    return H * (ris_response * h);
}

CMat cascaded_matrix(const CMat &H, const CVec &h)
{
    if (H.cols() != h.size())
        throw ShapeMismatch("cascaded_matrix: inconsistent shapes");
    const Eigen::Index M = h.size();
    CMat G(H.rows(), M * M);
    for (Eigen::Index j = 0; j < M; ++j)
        G.middleCols(j * M, M) = h(j) * H;
    return G;
}

CMat conventional_cascaded_matrix(const CMat &H, const CVec &h)
{
    if (H.cols() != h.size())
        throw ShapeMismatch("conventional_cascaded_matrix: inconsistent shapes");
    return H * h.asDiagonal();
}

CMat unvec_square(const Eigen::Ref<const CVec> &column)
{
    const auto M = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(column.size()))));
    if (M * M != column.size())
        throw ShapeMismatch("unvec_square: length is not a perfect square");
    return Eigen::Map<const CMat>(column.data(), M, M);
}

CMat noise_free_block(const CMat &H, const CVec &h, const CMat &lifted, double power)
{
    const Eigen::Index M = h.size();
    if (H.cols() != M || lifted.rows() != M * M)
        throw ShapeMismatch("noise_free_block: inconsistent shapes");
    CMat Y(H.rows(), lifted.cols());
    for (Eigen::Index t = 0; t < lifted.cols(); ++t)
    {
        const CMat B = unvec_square(lifted.col(t));
        Y.col(t) = std::sqrt(power) * (H * (B * h));
    }
    return Y;
}

ReceivedBlock synthesize_received(const CMat &H, const CVec &h, const CMat &lifted,
                                  const LinkBudget &budget, int user_index, Rng &rng)
{
    const Eigen::Index M = h.size();
    const Eigen::Index N = H.rows();
    if (H.cols() != M || lifted.rows() != M * M)
        throw ShapeMismatch("synthesize_received: inconsistent shapes");
    ReceivedBlock out;
    out.user_index = user_index;
    out.samples.resize(N, lifted.cols());
    const double amp = std::sqrt(budget.power);
    CVec n2(M);
    for (Eigen::Index t = 0; t < lifted.cols(); ++t)
    {
        const CMat B = unvec_square(lifted.col(t));
        for (Eigen::Index m = 0; m < M; ++m)
            n2(m) = budget.noise_ris > 0.0 ? complex_normal(rng, budget.noise_ris) : cd{};
        CVec col = H * (B * (amp * h + n2));
        if (budget.noise_bs > 0.0)
            for (Eigen::Index n = 0; n < N; ++n)
                col(n) += complex_normal(rng, budget.noise_bs);
        out.samples.col(t) = col;
    }
    return out;
}

} // namespace risce
