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

#include "risce/array_channel.hpp"

#include <optional>
#include <span>
#include <vector>

namespace risce
{

enum class Axis
{
    horizontal,
    vertical
};

/// Rearranged pilot block. Horizontal: count_h rows and count_v * tau columns
/// (slice v holds rows v*count_h .. v*count_h + count_h - 1). Vertical: count_v
/// rows and count_h * tau columns (slice h holds rows h, h + count_h, ...).
struct ReducedSnapshots
{
    Axis axis = Axis::horizontal;
    CMat data;
};

ReducedSnapshots dimension_reduce(const CMat &block, const UpaGeometry &bs, Axis axis);

/// Inverse of dimension_reduce.
CMat restore_block(const ReducedSnapshots &snapshots, const UpaGeometry &bs);

/// (1/Q) Y Y^H, Hermitian by construction.
CMat sample_covariance(const CMat &snapshots);

/// MDL model order for descending eigenvalues, clamped to [1, n - 1].
int estimate_source_count(const RVec &eigenvalues_desc, int snapshot_count);

/// Both estimators return `L` frequencies sorted ascending, wrapped to
/// [-1/2, 1/2). Throw DegenerateSubspace when the eigenvalue gap after the
/// L-th eigenvalue is below 1e-12 * trace.
std::vector<double> root_music(const CMat &R, int L);
std::vector<double> tls_esprit(const CMat &R, int L);

enum class DoaMethod
{
    root_music,
    esprit
};

struct SteeringEstimate
{
    std::vector<SpatialAngle> angles; // paired (z, y) per path
    std::vector<double> freqs_v;      // per axis, ascending
    std::vector<double> freqs_h;
    int path_count = 0;
    CMat steering; // N x path_count, columns a_N(angles[l])
};

/// Common BS AoA from the pilot blocks of all users. `known_paths` bypasses
/// the MDL order estimate.
SteeringEstimate common_aoa(std::span<const CMat> blocks, const UpaGeometry &bs, DoaMethod method,
                            std::optional<int> known_paths = std::nullopt);

} // namespace risce
