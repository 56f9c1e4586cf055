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

#include "risce/harness.hpp"

#include <benchmark/benchmark.h>

using namespace risce;

namespace
{

WireGeometry wires(int side) { return WireGeometry::on_upa({side, side, 0.5}, 1.0, 1.0 / 32, 1.0 / 500); }

void BM_ImpedanceMatrix(benchmark::State &state)
{
    const WireGeometry g = wires(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(impedance_matrix(g));
}
BENCHMARK(BM_ImpedanceMatrix)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Omp(benchmark::State &state)
{
    Rng rng = make_rng(1);
    const int rows = static_cast<int>(state.range(0));
    CMat D(rows, 4 * rows);
    for (Eigen::Index i = 0; i < D.size(); ++i)
        D(i) = complex_normal(rng, 1.0);
    const CVec y = D.col(3) + cd{0.5, -1.0} * D.col(17) + 2.0 * D.col(40);
    StopRule stop;
    stop.max_sparsity = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(omp(D, y, stop));
}
BENCHMARK(BM_Omp)->Arg(32)->Arg(128);

void BM_RootMusic(benchmark::State &state)
{
    const int n = static_cast<int>(state.range(0));
    CMat R = 1e-3 * CMat::Identity(n, n);
    for (double f : {-0.31, 0.07, 0.22})
    {
        const CVec a = steering_1d(n, f);
        R += a * a.adjoint();
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(root_music(R, 3));
}
BENCHMARK(BM_RootMusic)->Arg(8)->Arg(32);

void BM_OptimizerStep(benchmark::State &state)
{
    const CMat S = scattering_model(wires(4), 50.0).scattering;
    Rng rng = make_rng(2);
    const PhaseSchedule init = PhaseSchedule::lift(bernoulli_phases(16, 24, rng), S);
    for (auto _ : state)
    {
        const CMat G = riemannian_gradient(euclidean_gradient(init), init.gamma);
        benchmark::DoNotOptimize(G);
        benchmark::DoNotOptimize(objective(init));
    }
}
BENCHMARK(BM_OptimizerStep);

void BM_DefaultTrial(benchmark::State &state)
{
    SystemConfig c;
    c.methods = {Method::proposed_rootmusic};
    SystemCache cache;
    const auto sys = cache.prepare(c);
    int t = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_trial(*sys, t++));
}
BENCHMARK(BM_DefaultTrial)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
