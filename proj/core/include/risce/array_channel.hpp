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

#include <span>
#include <vector>

namespace risce
{

/// Uniform planar array. Element (v, h) sits at row v * count_h + h of every
/// steering vector, matching a_v(z) (x) a_h(y).
struct UpaGeometry
{
    int count_h = 1;
    int count_v = 1;
    double spacing = 0.5; // d / lambda

    int size() const { return count_h * count_v; }

    /// Throws ConfigError unless counts are positive and 0 < spacing <= 0.5.
    void validate() const;
};

/// Spatial-frequency pair (z: vertical, y: horizontal), each in [-d/lambda, d/lambda).
struct SpatialAngle
{
    double z = 0.0;
    double y = 0.0;

    bool operator==(const SpatialAngle &) const = default;
};

CVec steering_1d(int count, double freq);
CVec steering_vector(const UpaGeometry &geom, SpatialAngle angle);
CMat steering_matrix(const UpaGeometry &geom, std::span<const SpatialAngle> angles);

struct UserPaths
{
    std::vector<SpatialAngle> aoas; // at the RIS
    std::vector<cd> gains;          // beta_{k,j}
};

/// Ground truth for one Monte Carlo draw.
struct ChannelRealization
{
    std::vector<SpatialAngle> bs_aoas;
    std::vector<SpatialAngle> ris_aods;
    std::vector<cd> ris_bs_gains; // alpha_l
    std::vector<UserPaths> users;

    int path_count() const { return static_cast<int>(bs_aoas.size()); }
    void validate() const;
};

/// Statistical description of the propagation environment.
struct ChannelStatistics
{
    UpaGeometry bs;
    UpaGeometry ris;
    int paths_L = 3;
    std::vector<int> paths_J{2, 2, 2, 2};
    double distance_bs_ris = 100.0;  // metres
    double distance_ris_user = 10.0; // metres
    double gain_reference = 1e-3;
    double exponent_bs_ris = 2.2;
    double exponent_ris_user = 2.8;

    /// Snap angles onto grids: BS angles onto the critically sampled
    /// (count_h x count_v) grid, RIS angles onto the (grid_v x grid_h)
    /// dictionary grid. Per axis, paths of the same link get distinct grid
    /// points.
    bool on_grid = false;
    int ris_grid_v = 8;
    int ris_grid_h = 8;

    double variance_bs_ris() const;
    double variance_ris_user() const;
};

ChannelRealization sample_realization(const ChannelStatistics &stats, Rng &rng);

/// H = A_N diag(alpha) A_M^H, N x M.
CMat build_ris_bs_channel(const UpaGeometry &bs, const UpaGeometry &ris,
                          const ChannelRealization &realization);

/// h_k = A_{M,k} beta_k, length M.
CVec build_user_ris_channel(const UpaGeometry &ris, const ChannelRealization &realization,
                            int user_index);

/// H * response * h. With a diagonal response this is the uncoupled model.
CVec cascaded_channel(const CMat &H, const CMat &ris_response, const CVec &h);

/// Coupling-aware cascaded matrix G_k = h_k^T (x) H (N x M^2), so that
/// G_k vec(B) = H B h_k.
CMat cascaded_matrix(const CMat &H, const CVec &h);

/// Uncoupled cascaded matrix H diag(h_k) (N x M).
CMat conventional_cascaded_matrix(const CMat &H, const CVec &h);

struct ReceivedBlock
{
    CMat samples; // N x tau_k
    int user_index = 0;
};

/// Transmit power and noise levels in watts.
struct LinkBudget
{
    double power = 0.0;
    double noise_bs = 0.0;
    double noise_ris = 0.0;
};

/// Pilot block of one user. Column t of `lifted` is vec(B_t). Column t of the
/// result is sqrt(p) H B_t h + H B_t n2 + n1 with n1 ~ CN(0, noise_bs I_N) and
/// n2 ~ CN(0, noise_ris I_M).
ReceivedBlock synthesize_received(const CMat &H, const CVec &h, const CMat &lifted,
                                  const LinkBudget &budget, int user_index, Rng &rng);

/// sqrt(p) G Theta without any noise.
CMat noise_free_block(const CMat &H, const CVec &h, const CMat &lifted, double power);

/// Reshapes column t of an M^2 x tau matrix back into the M x M response.
CMat unvec_square(const Eigen::Ref<const CVec> &column);

} // namespace risce
