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

#include <cmath>
#include <map>
#include <utility>

namespace risce
{

void WireGeometry::validate() const
{
    if (!(length > 0.0) || !(radius > 0.0) || !(wavelength > 0.0))
        throw ConfigError("wire length, radius and wavelength must be positive");
    if (radius > length / 10.0)
        throw ConfigError("thin-wire model needs radius <= length / 10");
    if (positions.empty())
        throw ConfigError("wire geometry has no elements");
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            if ((positions[i] - positions[j]).norm() <= 1e-12 * wavelength)
                throw ConfigError("wire positions must be pairwise distinct");
}

WireGeometry WireGeometry::on_upa(const UpaGeometry &ris, double wavelength, double length,
                                  double radius)
{
    WireGeometry g;
    g.length = length;
    g.radius = radius;
    g.wavelength = wavelength;
    const double d = ris.spacing * wavelength;
    for (int v = 0; v < ris.count_v; ++v)
        for (int h = 0; h < ris.count_h; ++h)
            g.positions.emplace_back(0.0, h * d, v * d);
    return g;
}

namespace
{

struct Rule
{
    Eigen::VectorXd x;
    Eigen::VectorXd w;
};

// Gauss-Legendre on [-1, 1] via Golub-Welsch.
Rule gauss_legendre(int n)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
    {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule r;
    r.x = es.eigenvalues();
    r.w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return r;
}

// Nodes on [-half, half], split at 0 where the sine current has its kink.
Rule split_rule(int nodes, double half)
{
    const int n = std::max(1, nodes / 2);
    const Rule base = gauss_legendre(n);
    Rule r;
    r.x.resize(2 * n);
    r.w.resize(2 * n);
    for (int i = 0; i < n; ++i)
    {
        r.x(i) = 0.5 * half * (base.x(i) - 1.0);
        r.x(n + i) = 0.5 * half * (base.x(i) + 1.0);
        r.w(i) = r.w(n + i) = 0.5 * half * base.w(i);
    }
    return r;
}

double relative_change(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::pair<double, double> offsets(const WireGeometry &geom, int p, int q)
{
    const Eigen::Vector3d d = geom.positions[static_cast<std::size_t>(q)] - geom.positions[static_cast<std::size_t>(p)];
    const double rho1 = (p == q) ? geom.radius : std::hypot(d.x(), d.y());
    return {rho1, d.z()};
}

} // namespace

cd impedance_integral(const WireGeometry &geom, double rho1, double rho2, int nodes)
{
    const double k = geom.wavenumber();
    const double half = geom.length / 2.0;
    const double s = std::sin(k * half);
    const Rule r = split_rule(nodes, half);
    const Eigen::Index n = r.x.size();

    Eigen::VectorXd current(n);
    for (Eigen::Index i = 0; i < n; ++i)
        current(i) = std::sin(k * (half - std::abs(r.x(i))));

    cd acc{};
    for (Eigen::Index i = 0; i < n; ++i) // xi on wire p
    {
        cd row{};
        for (Eigen::Index j = 0; j < n; ++j) // z on wire q
        {
            const double u = r.x(j) - r.x(i) + rho2;
            const double u2 = u * u;
            const double R2 = rho1 * rho1 + u2;
            const double R = std::sqrt(R2);
            const cd bracket = cd(k * k - (k * k * u2 + 1.0) / R2 + 3.0 * u2 / (R2 * R2),
                                  -k / R + 3.0 * k * u2 / (R2 * R));
            row += r.w(j) * current(j) * std::polar(1.0 / R, -k * R) * bracket;
        }
        acc += r.w(i) * current(i) * row;
    }
    return kI * kFreeSpaceImpedance / (4.0 * kPi * k) * acc / (s * s);
}

double sine_normalization_gain(const WireGeometry &geom)
{
    const double s = std::sin(geom.wavenumber() * geom.length / 2.0);
    return 1.0 / (s * s);
}

namespace
{

cd converged_integral(const WireGeometry &geom, double rho1, double rho2,
                      const QuadratureOptions &opts)
{
    const cd coarse = impedance_integral(geom, rho1, rho2, opts.nodes);
    const cd fine = impedance_integral(geom, rho1, rho2, 2 * opts.nodes);
    if (relative_change(coarse, fine) > opts.tolerance)
        throw QuadratureNotConverged("impedance quadrature did not converge (rho1=" +
                                     std::to_string(rho1) + ", rho2=" + std::to_string(rho2) + ")");
    return fine;
}

} // namespace

cd mutual_impedance(const WireGeometry &geom, int p, int q, const QuadratureOptions &opts)
{
    if (p < 0 || q < 0 || p >= geom.size() || q >= geom.size())
        throw ShapeMismatch("mutual_impedance: element index out of range");
    const auto [rho1, rho2] = offsets(geom, p, q);
    // The integrand is even in rho2; |rho2| makes Z_qp and Z_pq bit-identical.
    return converged_integral(geom, rho1, std::abs(rho2), opts);
}

CMat impedance_matrix(const WireGeometry &geom, const QuadratureOptions &opts)
{
    geom.validate();
    const int M = geom.size();
    // Keys are offsets in units of 1e-9 wavelengths; the integrand is even in rho2.
    std::map<std::pair<long long, long long>, cd> cache;
    auto key = [&](double v) { return std::llround(v / geom.wavelength * 1e9); };
    CMat Z(M, M);
    for (int p = 0; p < M; ++p)
        for (int q = p; q < M; ++q)
        {
            const auto [rho1, rho2] = offsets(geom, p, q);
            const auto k = std::make_pair(key(rho1), key(std::abs(rho2)));
            auto it = cache.find(k);
            if (it == cache.end())
                it = cache.emplace(k, converged_integral(geom, rho1, std::abs(rho2), opts)).first;
            Z(q, p) = Z(p, q) = it->second;
        }
    return Z;
}

CMat scattering_matrix(const CMat &Z, double z0)
{
    if (Z.rows() != Z.cols())
        throw ShapeMismatch("scattering_matrix: Z must be square");
    const auto I = CMat::Identity(Z.rows(), Z.cols());
    Eigen::PartialPivLU<CMat> lu(Z + z0 * I);
    if (!(lu.rcond() >= 1e-12))
        throw SingularMatrix("Z + z0 I is numerically singular");
    return lu.solve(Z - z0 * I);
}

ScatteringModel scattering_model(const WireGeometry &geom, double z0, const QuadratureOptions &opts)
{
    ScatteringModel m;
    m.impedance = impedance_matrix(geom, opts);
    m.z0 = z0;
    m.scattering = scattering_matrix(m.impedance, z0);
    return m;
}

ScatteringModel uncoupled_model(int elements, double z0)
{
    ScatteringModel m;
    m.impedance = CMat::Identity(elements, elements) * z0;
    m.z0 = z0;
    m.scattering = CMat::Zero(elements, elements);
    return m;
}

CMat mc_response(const CVec &gamma, const CMat &S)
{
    if (S.rows() != gamma.size() || S.cols() != gamma.size())
        throw ShapeMismatch("mc_response: gamma and S sizes differ");
    CMat A = -S;
    for (Eigen::Index m = 0; m < gamma.size(); ++m)
    {
        if (gamma(m) == cd{})
            throw SingularMatrix("mc_response: zero reflection coefficient");
        A(m, m) += 1.0 / gamma(m);
    }
    Eigen::PartialPivLU<CMat> lu(A);
    if (!(lu.rcond() >= 1e-12))
        throw SingularMatrix("Gamma^{-1} - S is numerically singular");
    return lu.inverse();
}

} // namespace risce
