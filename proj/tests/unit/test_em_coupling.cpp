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

#include "risce/em_coupling.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace risce;
using risce::test::rel;

namespace
{

constexpr double kLambda = 1.0;

WireGeometry default_wires(int Mh, int Mv, double spacing)
{
    return WireGeometry::on_upa({Mh, Mv, spacing}, kLambda, kLambda / 32.0, kLambda / 500.0);
}

WireGeometry pair_at(double dy, double dz)
{
    WireGeometry g;
    g.length = kLambda / 32.0;
    g.radius = kLambda / 500.0;
    g.wavelength = kLambda;
    g.positions = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, dy, dz)};
    return g;
}

// Composite 5-point Gauss-Legendre with the kernel regrouped as
// [k^2 rho1^2 - 1 + 3u^2/R^2 + ik(3u^2/R - R)] / R^2.
cd composite_impedance(double length, double radius_or_rho1, double rho2, int panels)
{
    static const double x5[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                 0.9061798459386640};
    static const double w5[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                 0.2369268850561891};
    const double k = 2.0 * kPi / kLambda;
    const double half = length / 2.0;
    const double h = length / panels;
    std::vector<double> x, w;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < 5; ++i)
        {
            x.push_back(-half + (p + 0.5) * h + 0.5 * h * x5[i]);
            w.push_back(0.5 * h * w5[i]);
        }
    const double r1 = radius_or_rho1;
    cd acc{};
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
        {
            const double u = x[j] - x[i] + rho2;
            const double R = std::sqrt(r1 * r1 + u * u);
            const cd br(k * k * r1 * r1 - 1.0 + 3.0 * u * u / (R * R), k * (3.0 * u * u / R - R));
            acc += w[i] * w[j] * std::sin(k * (half - std::abs(x[i]))) * std::sin(k * (half - std::abs(x[j]))) *
                   std::exp(cd(0.0, -k * R)) / (R * R * R) * br;
        }
    const double s = std::sin(k * half);
    return cd(0.0, kFreeSpaceImpedance / (4.0 * kPi * k)) * acc / (s * s);
}

} // namespace

TEST_CASE("self impedance")
{
    const WireGeometry g = default_wires(1, 1, 0.5);
    const cd z = mutual_impedance(g, 0, 0);
    CHECK(std::abs(z - impedance_integral(g, g.radius, 0.0, 256)) <= 1e-4 * std::abs(z));
    CHECK(std::abs(z - composite_impedance(g.length, g.radius, 0.0, 400)) <= 1e-4 * std::abs(z));
    // Short dipole radiation resistance 20 pi^2 (l / lambda)^2.
    CHECK(z.real() == doctest::Approx(20.0 * kPi * kPi / (32.0 * 32.0)).epsilon(0.02));
    CHECK(z.imag() < 0.0);
    CHECK(sine_normalization_gain(g) == doctest::Approx(1.0 / std::pow(std::sin(kPi / 32.0), 2)).epsilon(1e-14));
}

TEST_CASE("mutual impedance is symmetric and decays with distance")
{
    const WireGeometry g = default_wires(4, 4, 0.5);
    for (int p = 0; p < 16; p += 5)
        for (int q = 0; q < 16; q += 3)
            CHECK(std::abs(mutual_impedance(g, p, q) - mutual_impedance(g, q, p)) == 0.0);

    const WireGeometry far = pair_at(6.0 * kLambda, 8.0 * kLambda);
    CHECK(std::abs(mutual_impedance(far, 0, 1)) <= 0.01 * std::abs(mutual_impedance(far, 0, 0)));

    // Off-axis neighbour against the composite oracle.
    const WireGeometry near = pair_at(0.5, 0.5);
    const cd zn = mutual_impedance(near, 0, 1);
    CHECK(std::abs(zn - composite_impedance(near.length, 0.5, 0.5, 40)) <= 1e-6 * std::abs(zn));
}

TEST_CASE("quadrature refinement failure is reported")
{
    const WireGeometry g = default_wires(1, 1, 0.5);
    QuadratureOptions coarse;
    coarse.nodes = 2;
    coarse.tolerance = 1e-12;
    CHECK_THROWS_AS(mutual_impedance(g, 0, 0, coarse), QuadratureNotConverged);
    CHECK_THROWS_AS(mutual_impedance(g, 0, 3), ShapeMismatch);
}

TEST_CASE("impedance matrix")
{
    const WireGeometry g1 = default_wires(1, 1, 0.5);
    const CMat Z1 = impedance_matrix(g1);
    REQUIRE(Z1.rows() == 1);
    CHECK(std::abs(Z1(0, 0) - mutual_impedance(g1, 0, 0)) == 0.0);

    const CMat Z4 = impedance_matrix(default_wires(2, 2, 0.5));
    for (int m = 1; m < 4; ++m)
        CHECK(std::abs(Z4(m, m) - Z4(0, 0)) == 0.0);
    CHECK(std::abs(Z4(0, 1) - Z4(2, 3)) == 0.0); // same horizontal offset
    CHECK(std::abs(Z4(0, 2) - Z4(1, 3)) == 0.0); // same vertical offset

    const WireGeometry g = default_wires(4, 4, 0.5);
    const CMat Z = impedance_matrix(g);
    CMat naive(16, 16);
    for (int p = 0; p < 16; ++p)
        for (int q = 0; q < 16; ++q)
            naive(q, p) = mutual_impedance(g, p, q);
    CHECK(rel(Z, naive) <= 1e-12);
    CHECK((Z - Z.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * Z.cwiseAbs().maxCoeff());

    // Translating every element leaves Z unchanged.
    WireGeometry moved = g;
    for (auto &p : moved.positions)
        p += Eigen::Vector3d(0.3, -1.7, 2.25);
    CHECK(rel(impedance_matrix(moved), Z) <= 1e-9);

    // Refinement from 64 to 128 nodes changes every entry by at most 1e-4.
    for (int p = 0; p < 16; ++p)
        for (int q = p; q < 16; ++q)
        {
            const Eigen::Vector3d d = g.positions[q] - g.positions[p];
            const double rho1 = p == q ? g.radius : std::hypot(d.x(), d.y());
            const cd a = impedance_integral(g, rho1, d.z(), 64);
            const cd b = impedance_integral(g, rho1, d.z(), 128);
            CHECK(std::abs(a - b) <= 1e-4 * std::abs(b));
        }
}

TEST_CASE("coupling weakens with spacing")
{
    double previous = 2.0;
    for (double spacing : {0.5, 1.0, 2.0, 5.0, 10.0})
    {
        WireGeometry g;
        g.length = kLambda / 32.0;
        g.radius = kLambda / 500.0;
        g.wavelength = kLambda;
        for (int v = 0; v < 4; ++v)
            for (int h = 0; h < 4; ++h)
                g.positions.emplace_back(0.0, h * spacing, v * spacing);
        const CMat S = scattering_model(g, 50.0).scattering;
        const CMat off = S - CMat(S.diagonal().asDiagonal());
        const double ratio = off.norm() / S.norm();
        CHECK(ratio < previous);
        previous = ratio;
    }
}

TEST_CASE("wire geometry validation")
{
    WireGeometry g = default_wires(2, 2, 0.5);
    g.radius = g.length / 5.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = default_wires(2, 2, 0.5);
    g.positions[1] = g.positions[0];
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("scattering matrix")
{
    const double z0 = 50.0;
    CHECK(scattering_matrix(z0 * CMat::Identity(5, 5), z0).norm() == 0.0);

    CVec zd(3);
    zd << cd(10, 5), cd(80, -30), cd(0.2, -1500);
    const CMat S = scattering_matrix(zd.asDiagonal(), z0);
    for (int m = 0; m < 3; ++m)
        CHECK(std::abs(S(m, m) - (zd(m) - z0) / (zd(m) + z0)) <= 1e-15);
    CHECK((S - CMat(S.diagonal().asDiagonal())).norm() == 0.0);

    const ScatteringModel sm = scattering_model(default_wires(4, 4, 0.5), z0);
    const CMat I = CMat::Identity(16, 16);
    CHECK(((sm.impedance + z0 * I) * sm.scattering - (sm.impedance - z0 * I)).norm() <= 1e-10 * sm.impedance.norm());

    CHECK_THROWS_AS(scattering_matrix(-z0 * CMat::Identity(2, 2), z0), SingularMatrix);
}

TEST_CASE("coupling-aware response")
{
    Rng rng = make_rng(21);
    const CVec gamma = test::random_phases(4, rng);
    CHECK(rel(mc_response(gamma, CMat::Zero(4, 4)), CMat(gamma.asDiagonal())) <= 1e-15);

    const double th = 0.7;
    const cd s{0.3, -0.2};
    CMat S1(1, 1);
    S1(0, 0) = s;
    CVec g1(1);
    g1(0) = std::polar(1.0, th);
    CHECK(std::abs(mc_response(g1, S1)(0, 0) - 1.0 / (std::polar(1.0, -th) - s)) <= 1e-15);

    // Neumann series sum (Gamma S)^n Gamma.
    CMat S = test::random_complex(4, 4, rng);
    S *= 0.45 / S.operatorNorm();
    const CMat G = gamma.asDiagonal();
    CMat term = G, sum = G;
    for (int n = 1; n <= 60; ++n)
    {
        term = G * S * term;
        sum += term;
    }
    const CMat B = mc_response(gamma, S);
    CHECK(rel(B, sum) <= 1e-8);
    CHECK(rel((CMat(gamma.cwiseInverse().asDiagonal()) - S) * B, CMat::Identity(4, 4)) <= 1e-10);

    CMat Ss(1, 1);
    Ss(0, 0) = cd(1.0, 0.0);
    CVec one(1);
    one(0) = 1.0;
    CHECK_THROWS_AS(mc_response(one, Ss), SingularMatrix);
}

TEST_CASE("coupling-aware response is continuous at the default geometry")
{
    const CMat S = scattering_model(default_wires(4, 4, 0.5), 50.0).scattering;
    Rng rng = make_rng(22);
    for (int trial = 0; trial < 10; ++trial)
    {
        const CVec gamma = test::random_phases(16, rng);
        CVec moved = gamma;
        moved(trial) *= std::polar(1.0, 1e-6);
        const CMat B = mc_response(gamma, S);
        const double change = (mc_response(moved, S) - B).norm();
        // First-order change: |d B| = |B e_m| |e_m^T B| / |gamma_m|^2 * 1e-6.
        const double first = B.col(trial).norm() * B.row(trial).norm() * 1e-6;
        CHECK(change <= 1.01 * first);
        CHECK(change >= 0.99 * first);
    }
}
