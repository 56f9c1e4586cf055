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

#include <limits>
#include <vector>

namespace risce
{

/// g-th point of a D-point grid over [-spacing, spacing): (-1 + 2g/D) * spacing.
double grid_freq(int g, int D, double spacing);

/// count x D matrix of 1-D steering vectors on the grid.
CMat axis_dictionary(int count, int D, double spacing);

struct GridDictionary
{
    CMat atoms;                    // M x (D_v * D_h)
    std::vector<SpatialAngle> grid; // column g_v * D_h + g_h
    int D_v = 0;
    int D_h = 0;

    int size() const { return D_v * D_h; }
};

/// Kronecker grid dictionary. Requires D_v >= count_v and D_h >= count_h.
GridDictionary grid_dictionary(const UpaGeometry &geom, int D_v, int D_h);

/// Stop once the residual energy is at or below
/// max(floor * ||y||^2, noise_factor * noise_energy), or at max_sparsity atoms.
/// At least min_sparsity atoms are taken while the residual is nonzero.
struct StopRule
{
    double floor = 1e-6;
    double noise_energy = 0.0;
    double noise_factor = 3.0;
    int max_sparsity = std::numeric_limits<int>::max();
    int min_sparsity = 0;

    double threshold(double measurement_energy) const;
};

struct SparseSolution
{
    std::vector<int> support;
    CVec coefficients;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<double> residual_trace; // residual norm after each iteration
    bool converged = true;              // SBL only
};

/// Orthogonal matching pursuit with a least-squares refit on every iteration.
SparseSolution omp(const CMat &dictionary, const CVec &measurement, const StopRule &stop);

/// OMP followed by single-atom exchanges: each support atom is replaced by
/// the atom that lowers the least-squares residual most, until no exchange
/// helps. Atoms whose removal keeps the residual under the stopping
/// threshold are then dropped.
SparseSolution omp_exchange(const CMat &dictionary, const CVec &measurement, const StopRule &stop,
                            int max_passes = 8);

/// Simultaneous OMP: one support shared by all columns of `measurements`.
/// Coefficients are stored row-per-atom in `coefficients_matrix`.
struct JointSparseSolution
{
    std::vector<int> support;
    CMat coefficients; // |support| x columns
    double residual_norm = 0.0;
};
JointSparseSolution somp(const CMat &dictionary, const CMat &measurements, const StopRule &stop);

/// Largest normalised inner product between distinct columns.
double mutual_coherence(const CMat &D);

struct SblOptions
{
    int max_iter = 50;
    double tol = 1e-3;
    double prune = 1e-8; // relative to the largest hyperparameter
};

/// Evidence-maximisation sparse Bayesian learning with a jointly estimated
/// noise variance.
SparseSolution sbl_recover(const CMat &dictionary, const CVec &measurement, const SblOptions &opts = {});

} // namespace risce
