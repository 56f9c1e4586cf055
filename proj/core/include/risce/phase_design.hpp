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

#include "risce/em_coupling.hpp"

#include <vector>

namespace risce
{

/// RIS training matrix. Column t of `gamma` holds the reflection coefficients
/// of slot t; column t of `lifted` is vec(B_t) for the same slot.
struct PhaseSchedule
{
    CMat gamma;  // M x tau
    CMat lifted; // M^2 x tau
    CMat scattering;

    int elements() const { return static_cast<int>(gamma.rows()); }
    int slots() const { return static_cast<int>(gamma.cols()); }

    static PhaseSchedule lift(const CMat &gamma, const CMat &S);

    /// First `tau` slots.
    PhaseSchedule truncated(int tau) const;
};

/// M x tau matrix with entries drawn uniformly from {-1, +1}.
CMat bernoulli_phases(int elements, int slots, Rng &rng);

/// ||lifted lifted^H - I||_F^2 evaluated through the tau x tau Gram.
double objective(const PhaseSchedule &schedule);

/// Gradient of the objective with respect to gamma, in the sense
/// df = Re <G, d gamma>.
CMat euclidean_gradient(const PhaseSchedule &schedule);

/// Projection onto the tangent space of the complex circle at gamma.
CMat riemannian_gradient(const CMat &euclidean, const CMat &gamma);

struct OptimizerOptions
{
    int max_iter = 300;
    double grad_tol = -1.0; // negative: 1e-6 * M * tau
    double armijo_c = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 30;
    int restart_every = 50;
};

struct OptimizerState
{
    std::vector<double> objective_trace; // initial value, then one per accepted step
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
};

struct OptimizedSchedule
{
    PhaseSchedule schedule;
    OptimizerState state;
};

/// Polak-Ribiere conjugate gradient on the complex circle manifold with
/// Armijo backtracking and the entrywise retraction gamma / |gamma|.
OptimizedSchedule optimize(const PhaseSchedule &init, const OptimizerOptions &opts = {});

} // namespace risce
