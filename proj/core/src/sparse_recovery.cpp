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

#include "risce/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>

namespace risce
{

double grid_freq(int g, int D, double spacing) { return (-1.0 + 2.0 * g / D) * spacing; }

CMat axis_dictionary(int count, int D, double spacing)
{
    CMat A(count, D);
    for (int g = 0; g < D; ++g)
        A.col(g) = steering_1d(count, grid_freq(g, D, spacing));
    return A;
}

GridDictionary grid_dictionary(const UpaGeometry &geom, int D_v, int D_h)
{
    if (D_v < geom.count_v || D_h < geom.count_h)
        throw ConfigError("dictionary resolution below the array size");
    GridDictionary d;
    d.D_v = D_v;
    d.D_h = D_h;
    d.atoms.resize(geom.size(), D_v * D_h);
    for (int gv = 0; gv < D_v; ++gv)
        for (int gh = 0; gh < D_h; ++gh)
        {
            const SpatialAngle a{grid_freq(gv, D_v, geom.spacing), grid_freq(gh, D_h, geom.spacing)};
            d.grid.push_back(a);
            d.atoms.col(gv * D_h + gh) = steering_vector(geom, a);
        }
    return d;
}

double StopRule::threshold(double energy) const
{
    return std::max(floor * energy, noise_factor * noise_energy);
}

namespace
{

// Least-squares fit of y on the selected columns; returns coefficients.
CVec refit(const CMat &Phi, const CVec &y)
{
    return Phi.colPivHouseholderQr().solve(y);
}

} // namespace

SparseSolution omp(const CMat &D, const CVec &y, const StopRule &stop)
{
    if (D.rows() != y.size())
        throw ShapeMismatch("omp: dictionary rows differ from measurement length");
    const RVec norms = D.colwise().norm().transpose();
    SparseSolution sol;
    const double energy = y.squaredNorm();
    sol.residual_norm = std::sqrt(energy);
    if (energy == 0.0)
        return sol;

    const double thr = stop.threshold(energy);
    const int cap = static_cast<int>(std::min<Eigen::Index>(stop.max_sparsity, std::min(D.rows(), D.cols())));
    CVec r = y;
    std::vector<char> used(static_cast<std::size_t>(D.cols()), 0);
    CMat Phi(D.rows(), 0);
    while (sol.iterations < cap)
    {
        const double rn2 = r.squaredNorm();
        if (rn2 <= thr && sol.iterations >= stop.min_sparsity)
            break;
        if (rn2 == 0.0)
            break;
        const CVec c = D.adjoint() * r;
        int best = -1;
        double best_val = -1.0;
        for (Eigen::Index j = 0; j < D.cols(); ++j)
        {
            if (used[static_cast<std::size_t>(j)] || norms(j) == 0.0)
                continue;
            const double v = std::abs(c(j)) / norms(j);
            if (v > best_val * (1.0 + 1e-12))
            {
                best_val = v;
                best = static_cast<int>(j);
            }
        }
        if (best < 0)
            break;
        used[static_cast<std::size_t>(best)] = 1;
        sol.support.push_back(best);
        Phi.conservativeResize(Eigen::NoChange, Phi.cols() + 1);
        Phi.rightCols(1) = D.col(best);
        sol.coefficients = refit(Phi, y);
        r = y - Phi * sol.coefficients;
        ++sol.iterations;
        sol.residual_trace.push_back(r.norm());
    }
    sol.residual_norm = r.norm();
    return sol;
}

namespace
{

// Orthonormal basis of the selected columns.
CMat basis(const CMat &D, const std::vector<int> &cols)
{
    CMat Phi(D.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
        Phi.col(static_cast<Eigen::Index>(i)) = D.col(cols[i]);
    Eigen::HouseholderQR<CMat> qr(Phi);
    return qr.householderQ() * CMat::Identity(D.rows(), Phi.cols());
}

// Candidates closer than this (energy fraction) to the span of the others are
// skipped: near-collinear pairs fit the residual with huge cancelling weights.
constexpr double kMinPerpFraction = 1e-2;

double residual_energy(const CMat &D, const std::vector<int> &cols, const CVec &y)
{
    if (cols.empty())
        return y.squaredNorm();
    const CMat Q = basis(D, cols);
    return (y - Q * (Q.adjoint() * y)).squaredNorm();
}

} // namespace

SparseSolution omp_exchange(const CMat &D, const CVec &y, const StopRule &stop, int max_passes)
{
    SparseSolution sol = omp(D, y, stop);
    const double energy = y.squaredNorm();
    if (sol.support.empty())
        return sol;
    const double thr = stop.threshold(energy);
    const RVec norms2 = D.colwise().squaredNorm().transpose();
    std::vector<int> S = sol.support;
    double current = residual_energy(D, S, y);

    for (int pass = 0; pass < max_passes && current > 0.0; ++pass)
    {
        bool improved = false;
        for (std::size_t i = 0; i < S.size(); ++i)
        {
            std::vector<int> rest = S;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
            CVec r = y;
            CMat QD;
            if (!rest.empty())
            {
                const CMat Q = basis(D, rest);
                r -= Q * (Q.adjoint() * y);
                QD = Q.adjoint() * D;
            }
            const CVec c = D.adjoint() * r;
            const double base = r.squaredNorm();
            int best = -1;
            double best_energy = current;
            for (Eigen::Index j = 0; j < D.cols(); ++j)
            {
                if (std::find(S.begin(), S.end(), static_cast<int>(j)) != S.end())
                    continue;
                const double perp = norms2(j) - (rest.empty() ? 0.0 : QD.col(j).squaredNorm());
                if (perp <= kMinPerpFraction * norms2(j))
                    continue;
                const double e = base - std::norm(c(j)) / perp;
                if (e < best_energy * (1.0 - 1e-9))
                {
                    best_energy = e;
                    best = static_cast<int>(j);
                }
            }
            if (best >= 0)
            {
                S[i] = best;
                current = residual_energy(D, S, y);
                improved = true;
            }
        }
        if (!improved)
            break;
    }

    // Drop atoms that the threshold does not need.
    while (static_cast<int>(S.size()) > std::max(stop.min_sparsity, 1))
    {
        std::size_t drop = S.size();
        double drop_energy = thr;
        for (std::size_t i = 0; i < S.size(); ++i)
        {
            std::vector<int> rest = S;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
            const double e = residual_energy(D, rest, y);
            if (e <= drop_energy)
            {
                drop_energy = e;
                drop = i;
            }
        }
        if (drop == S.size())
            break;
        S.erase(S.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    sol.support = S;
    CMat Phi(D.rows(), static_cast<Eigen::Index>(S.size()));
    for (std::size_t i = 0; i < S.size(); ++i)
        Phi.col(static_cast<Eigen::Index>(i)) = D.col(S[i]);
    sol.coefficients = refit(Phi, y);
    sol.residual_norm = (y - Phi * sol.coefficients).norm();
    sol.residual_trace.push_back(sol.residual_norm);
    return sol;
}

JointSparseSolution somp(const CMat &D, const CMat &Y, const StopRule &stop)
{
    if (D.rows() != Y.rows())
        throw ShapeMismatch("somp: dictionary rows differ from measurement length");
    const RVec norms = D.colwise().norm().transpose();
    JointSparseSolution sol;
    const double energy = Y.squaredNorm();
    sol.residual_norm = std::sqrt(energy);
    if (energy == 0.0)
        return sol;
    const double thr = stop.threshold(energy);
    const int cap = static_cast<int>(std::min<Eigen::Index>(stop.max_sparsity, std::min(D.rows(), D.cols())));
    CMat R = Y;
    std::vector<char> used(static_cast<std::size_t>(D.cols()), 0);
    CMat Phi(D.rows(), 0);
    while (static_cast<int>(sol.support.size()) < cap)
    {
        const double rn2 = R.squaredNorm();
        if ((rn2 <= thr && static_cast<int>(sol.support.size()) >= stop.min_sparsity) || rn2 == 0.0)
            break;
        const RVec score = (D.adjoint() * R).rowwise().squaredNorm();
        int best = -1;
        double best_val = -1.0;
        for (Eigen::Index j = 0; j < D.cols(); ++j)
        {
            if (used[static_cast<std::size_t>(j)] || norms(j) == 0.0)
                continue;
            const double v = score(j) / (norms(j) * norms(j));
            if (v > best_val * (1.0 + 1e-12))
            {
                best_val = v;
                best = static_cast<int>(j);
            }
        }
        if (best < 0)
            break;
        used[static_cast<std::size_t>(best)] = 1;
        sol.support.push_back(best);
        Phi.conservativeResize(Eigen::NoChange, Phi.cols() + 1);
        Phi.rightCols(1) = D.col(best);
        sol.coefficients = Phi.colPivHouseholderQr().solve(Y);
        R = Y - Phi * sol.coefficients;
    }
    sol.residual_norm = R.norm();
    return sol;
}

double mutual_coherence(const CMat &D)
{
    if (D.cols() < 2)
        throw ShapeMismatch("mutual_coherence: need at least two columns");
    const RVec norms = D.colwise().norm().transpose();
    if ((norms.array() == 0.0).any())
        throw ShapeMismatch("mutual_coherence: zero column");
    CMat Dn = D;
    for (Eigen::Index j = 0; j < D.cols(); ++j)
        Dn.col(j) /= norms(j);
    CMat G = Dn.adjoint() * Dn;
    G.diagonal().setZero();
    return std::min(1.0, G.cwiseAbs().maxCoeff());
}

SparseSolution sbl_recover(const CMat &Phi, const CVec &y, const SblOptions &opts)
{
    const Eigen::Index m = Phi.rows();
    const Eigen::Index n = Phi.cols();
    if (y.size() != m)
        throw ShapeMismatch("sbl_recover: dictionary rows differ from measurement length");
    SparseSolution sol;
    const double energy = y.squaredNorm();
    sol.residual_norm = std::sqrt(energy);
    if (energy == 0.0)
        return sol;

    const RVec col_energy = Phi.colwise().squaredNorm().transpose();
    std::vector<int> active;
    for (Eigen::Index j = 0; j < n; ++j)
        if (col_energy(j) > 0.0)
            active.push_back(static_cast<int>(j));
    RVec gamma = RVec::Constant(n, energy / col_energy.maxCoeff() / std::max<Eigen::Index>(1, m));
    double sigma2 = 0.1 * energy / static_cast<double>(m);
    CVec mu = CVec::Zero(n);
    sol.converged = false;

    for (int it = 0; it < opts.max_iter; ++it)
    {
        const auto A = static_cast<Eigen::Index>(active.size());
        if (A == 0)
            break;
        CMat Pa(m, A);
        RVec ga(A);
        for (Eigen::Index i = 0; i < A; ++i)
        {
            Pa.col(i) = Phi.col(active[static_cast<std::size_t>(i)]);
            ga(i) = gamma(active[static_cast<std::size_t>(i)]);
        }
        CMat Sy = Pa * ga.asDiagonal() * Pa.adjoint();
        Sy.diagonal().array() += sigma2;
        Eigen::LDLT<CMat> ldlt(Sy);
        const CMat SiP = ldlt.solve(Pa);  // Sy^{-1} Phi_a
        const CVec Siy = ldlt.solve(y);
        const CVec mua = ga.asDiagonal() * (Pa.adjoint() * Siy);
        RVec post_var(A);
        for (Eigen::Index i = 0; i < A; ++i)
            post_var(i) = ga(i) - ga(i) * ga(i) * std::real(Pa.col(i).dot(SiP.col(i)));

        RVec gnew(A);
        for (Eigen::Index i = 0; i < A; ++i)
            gnew(i) = std::norm(mua(i)) + std::max(post_var(i), 0.0);
        const double resid = (y - Pa * mua).squaredNorm();
        double dof = 0.0;
        for (Eigen::Index i = 0; i < A; ++i)
            if (ga(i) > 0.0)
                dof += 1.0 - std::max(post_var(i), 0.0) / ga(i);
        sigma2 = std::max((resid + sigma2 * dof) / static_cast<double>(m), 1e-12 * energy / m);

        const double gmax = std::max(gnew.maxCoeff(), 1e-300);
        const double change = (gnew - ga).cwiseAbs().maxCoeff() / gmax;
        mu.setZero();
        std::vector<int> keep;
        for (Eigen::Index i = 0; i < A; ++i)
        {
            const int j = active[static_cast<std::size_t>(i)];
            gamma(j) = gnew(i);
            if (gnew(i) > opts.prune * gmax)
            {
                keep.push_back(j);
                mu(j) = mua(i);
            }
            else
                gamma(j) = 0.0;
        }
        active = std::move(keep);
        sol.iterations = it + 1;
        if (change < opts.tol)
        {
            sol.converged = true;
            break;
        }
    }

    sol.support = active;
    sol.coefficients.resize(static_cast<Eigen::Index>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i)
        sol.coefficients(static_cast<Eigen::Index>(i)) = mu(active[i]);
    sol.residual_norm = (y - Phi * mu).norm();
    sol.residual_trace.push_back(sol.residual_norm);
    return sol;
}

} // namespace risce
