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

#include "risce/phase_design.hpp"
#include "risce/protocol.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace risce;
using risce::test::rel;

namespace
{

CMat default_scattering(int side)
{
    return scattering_model(WireGeometry::on_upa({side, side, 0.5}, 1.0, 1.0 / 32, 1.0 / 500), 50.0).scattering;
}

double objective_at(const CMat &gamma, const CMat &S) { return objective(PhaseSchedule::lift(gamma, S)); }

// d f / d theta along delta, for gamma = exp(i theta): central difference.
double directional_fd(const CMat &gamma, const CMat &S, const Eigen::MatrixXd &delta, double eps)
{
    const CMat up = gamma.array() * (cd(0, eps) * delta.cast<cd>()).array().exp();
    const CMat dn = gamma.array() * (cd(0, -eps) * delta.cast<cd>()).array().exp();
    return (objective_at(up, S) - objective_at(dn, S)) / (2.0 * eps);
}

double directional_analytic(const CMat &G, const CMat &gamma, const Eigen::MatrixXd &delta)
{
    return std::real((G.array().conjugate() * (cd(0, 1) * gamma.array() * delta.cast<cd>().array())).sum());
}

} // namespace

TEST_CASE("objective")
{
    Rng rng = make_rng(51);
    PhaseSchedule s;
    s.gamma = CMat::Ones(4, 5);
    s.lifted = test::random_complex(16, 16, rng).householderQr().householderQ() * CMat::Identity(16, 5);
    CHECK(objective(s) == doctest::Approx(16.0 - 5.0).epsilon(1e-12));

    PhaseSchedule one;
    one.gamma = CMat::Ones(4, 1);
    one.lifted = test::random_complex(16, 1, rng);
    one.lifted.normalize();
    CHECK(objective(one) == doctest::Approx(15.0).epsilon(1e-12));

    const CMat S = default_scattering(4);
    const PhaseSchedule b = PhaseSchedule::lift(bernoulli_phases(16, 24, rng), S);
    const CMat gram = b.lifted * b.lifted.adjoint() - CMat::Identity(256, 256);
    CHECK(objective(b) == doctest::Approx(gram.squaredNorm()).epsilon(1e-8));
}

TEST_CASE("schedule lifting")
{
    Rng rng = make_rng(52);
    const CMat S = default_scattering(2);
    const CMat gamma = test::random_phases(4 * 6, rng).reshaped(4, 6);
    const PhaseSchedule s = PhaseSchedule::lift(gamma, S);
    for (int t = 0; t < 6; ++t)
    {
        const CMat B = mc_response(gamma.col(t), S);
        CHECK(rel(s.lifted.col(t), Eigen::Map<const CVec>(B.data(), 16)) <= 1e-10);
    }
    const PhaseSchedule t3 = s.truncated(3);
    CHECK(t3.slots() == 3);
    CHECK(rel(t3.lifted, s.lifted.leftCols(3)) == 0.0);
    CHECK_THROWS_AS(s.truncated(7), ShapeMismatch);
    const CMat bp = bernoulli_phases(16, 30, rng);
    CHECK((bp.array().real().abs() - 1.0).abs().maxCoeff() == 0.0);
    CHECK(bp.imag().norm() == 0.0);
}

TEST_CASE("gradient matches finite differences")
{
    Rng rng = make_rng(53);
    std::normal_distribution<double> nd;
    const double eps = 1e-6;

    SUBCASE("no coupling")
    {
        const CMat S = CMat::Zero(4, 4);
        const CMat gamma = test::random_phases(12, rng).reshaped(4, 3);
        const CMat G = euclidean_gradient(PhaseSchedule::lift(gamma, S));
        // Entry by entry in phase coordinates.
        Eigen::MatrixXd fd(4, 3), an(4, 3);
        for (int m = 0; m < 4; ++m)
            for (int t = 0; t < 3; ++t)
            {
                Eigen::MatrixXd e = Eigen::MatrixXd::Zero(4, 3);
                e(m, t) = 1.0;
                fd(m, t) = directional_fd(gamma, S, e, eps);
                an(m, t) = directional_analytic(G, gamma, e);
            }
        CHECK((fd - an).norm() <= 1e-5 * an.norm());
    }

    SUBCASE("default coupling, random tangent directions")
    {
        const CMat S = default_scattering(2);
        const CMat gamma = test::random_phases(12, rng).reshaped(4, 3);
        const CMat GR = riemannian_gradient(euclidean_gradient(PhaseSchedule::lift(gamma, S)), gamma);
        for (int k = 0; k < 10; ++k)
        {
            Eigen::MatrixXd delta(4, 3);
            for (Eigen::Index i = 0; i < delta.size(); ++i)
                delta(i) = nd(rng);
            const double fd = directional_fd(gamma, S, delta, eps);
            const double an = directional_analytic(GR, gamma, delta);
            CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
        }
    }
}

TEST_CASE("stationary points of a single element")
{
    CMat S(1, 1);
    S(0, 0) = 0.3;
    for (double g : {1.0, -1.0})
    {
        CMat gamma(1, 1);
        gamma(0, 0) = g;
        const PhaseSchedule s = PhaseSchedule::lift(gamma, S);
        CHECK(riemannian_gradient(euclidean_gradient(s), gamma).norm() <= 1e-12);
        const OptimizedSchedule o = optimize(s);
        CHECK(o.state.iterations == 0);
        CHECK(o.state.converged);
        CHECK(rel(o.schedule.gamma, gamma) == 0.0);
    }
}

TEST_CASE("Riemannian projection")
{
    Rng rng = make_rng(54);
    const CMat gamma = test::random_phases(20, rng).reshaped(4, 5);
    Eigen::MatrixXd c(4, 5);
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c(i) = std::normal_distribution<double>()(rng);
    const CMat radial = c.cast<cd>().array() * gamma.array();
    CHECK(riemannian_gradient(radial, gamma).norm() <= 1e-14 * radial.norm());

    const CMat tangent = cd(0, 1) * (c.cast<cd>().array() * gamma.array()).matrix();
    CHECK(rel(riemannian_gradient(tangent, gamma), tangent) <= 1e-14);

    const CMat E = test::random_complex(4, 5, rng);
    const CMat P = riemannian_gradient(E, gamma);
    CHECK((P.array() * gamma.array().conjugate()).real().abs().maxCoeff() <= 1e-12);
}

TEST_CASE("optimiser on the default coupling")
{
    const CMat S = default_scattering(4);
    for (std::uint64_t seed = 0; seed < 3; ++seed)
    {
        Rng rng = make_rng(55, {seed});
        const PhaseSchedule init = PhaseSchedule::lift(bernoulli_phases(16, 24, rng), S);
        OptimizerOptions opts;
        opts.max_iter = 60;
        const OptimizedSchedule o = optimize(init, opts);
        const auto &tr = o.state.objective_trace;
        REQUIRE(tr.size() == static_cast<std::size_t>(o.state.iterations) + 1);
        CHECK(tr.front() == doctest::Approx(objective(init)));
        CHECK(tr.back() < tr.front());
        for (std::size_t i = 1; i < tr.size(); ++i)
            CHECK(tr[i] <= tr[i - 1]);
        CHECK((o.schedule.gamma.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12);
        CHECK(rel(o.schedule.lifted, PhaseSchedule::lift(o.schedule.gamma, S).lifted) <= 1e-10);
    }
}

TEST_CASE("optimised schedules are no more coherent than +-1 schedules")
{
    const CMat S = default_scattering(4);
    const UpaGeometry ris{4, 4, 0.5};
    const CMat A = grid_dictionary(ris, 8, 8).atoms;
    int no_worse = 0;
    const int runs = 20;
    for (int seed = 0; seed < runs; ++seed)
    {
        Rng rng = make_rng(56, {static_cast<std::uint64_t>(seed)});
        const PhaseSchedule init = PhaseSchedule::lift(bernoulli_phases(16, 24, rng), S);
        const PhaseSchedule opt = optimize(init).schedule;
        const double mb = mutual_coherence(kron_dictionary(init.lifted, A, A));
        const double mo = mutual_coherence(kron_dictionary(opt.lifted, A, A));
        no_worse += mo <= mb;
    }
    CHECK(no_worse >= (9 * runs + 9) / 10);
}
