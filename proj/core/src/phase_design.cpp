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

#include <cmath>

namespace risce
{

PhaseSchedule PhaseSchedule::lift(const CMat &gamma, const CMat &S)
{
    const Eigen::Index M = gamma.rows();
    if (S.rows() != M || S.cols() != M)
        throw ShapeMismatch("PhaseSchedule::lift: S does not match the element count");
    PhaseSchedule s;
    s.gamma = gamma;
    s.scattering = S;
    s.lifted.resize(M * M, gamma.cols());
    for (Eigen::Index t = 0; t < gamma.cols(); ++t)
    {
        const CMat B = mc_response(gamma.col(t), S);
        s.lifted.col(t) = Eigen::Map<const CVec>(B.data(), M * M);
    }
    return s;
}

PhaseSchedule PhaseSchedule::truncated(int tau) const
{
    if (tau < 1 || tau > slots())
        throw ShapeMismatch("PhaseSchedule::truncated: slot count out of range");
    PhaseSchedule s;
    s.gamma = gamma.leftCols(tau);
    s.lifted = lifted.leftCols(tau);
    s.scattering = scattering;
    return s;
}

CMat bernoulli_phases(int elements, int slots, Rng &rng)
{
    std::bernoulli_distribution coin(0.5);
    CMat g(elements, slots);
    for (int t = 0; t < slots; ++t)
        for (int m = 0; m < elements; ++m)
            g(m, t) = coin(rng) ? 1.0 : -1.0;
    return g;
}

double objective(const PhaseSchedule &s)
{
    const Eigen::Index tau = s.lifted.cols();
    const Eigen::Index M2 = s.lifted.rows();
    CMat G = s.lifted.adjoint() * s.lifted;
    G.diagonal().array() -= 1.0;
    return G.squaredNorm() + static_cast<double>(M2 - tau);
}

CMat euclidean_gradient(const PhaseSchedule &s)
{
    const Eigen::Index M = s.gamma.rows();
    const Eigen::Index tau = s.gamma.cols();
    CMat gram = s.lifted.adjoint() * s.lifted;
    gram.diagonal().array() -= 1.0;
    const CMat E = 4.0 * s.lifted * gram; // gradient with respect to the lifted matrix

    CMat G(M, tau);
    for (Eigen::Index t = 0; t < tau; ++t)
    {
        const auto B = Eigen::Map<const CMat>(s.lifted.col(t).data(), M, M);
        const auto R = Eigen::Map<const CMat>(E.col(t).data(), M, M);
        const CMat BRB = B * R.adjoint() * B;
        for (Eigen::Index m = 0; m < M; ++m)
        {
            const cd g = s.gamma(m, t);
            G(m, t) = std::conj(BRB(m, m) / (g * g));
        }
    }
    return G;
}

CMat riemannian_gradient(const CMat &euclidean, const CMat &gamma)
{
    if (euclidean.rows() != gamma.rows() || euclidean.cols() != gamma.cols())
        throw ShapeMismatch("riemannian_gradient: shapes differ");
    const Eigen::ArrayXXd radial = (euclidean.array() * gamma.array().conjugate()).real();
    return (euclidean.array() - radial.cast<cd>() * gamma.array()).matrix();
}

namespace
{

CMat retract(const CMat &x)
{
    return x.unaryExpr([](cd v) { return v / std::abs(v); });
}

double inner(const CMat &a, const CMat &b) { return std::real((a.array().conjugate() * b.array()).sum()); }

} // namespace

OptimizedSchedule optimize(const PhaseSchedule &init, const OptimizerOptions &opts)
{
    const CMat &S = init.scattering;
    const double tol = opts.grad_tol >= 0.0 ? opts.grad_tol : 1e-6 * init.elements() * init.slots();

    OptimizedSchedule out{init, {}};
    PhaseSchedule &x = out.schedule;
    OptimizerState &st = out.state;
    double fx = objective(x);
    st.objective_trace.push_back(fx);

    CMat g = riemannian_gradient(euclidean_gradient(x), x.gamma);
    CMat d = -g;
    int since_restart = 0;
    for (int it = 0; it < opts.max_iter; ++it)
    {
        st.gradient_norm = g.norm();
        if (st.gradient_norm <= tol)
        {
            st.converged = true;
            break;
        }
        double slope = inner(g, d);
        if (!(slope < 0.0))
        {
            d = -g;
            slope = -g.squaredNorm();
            since_restart = 0;
        }

        bool accepted = false;
        bool steepest = since_restart == 0;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt)
        {
            double alpha = 1.0 / st.gradient_norm;
            for (int k = 0; k < opts.max_backtracks; ++k)
            {
                PhaseSchedule probe = PhaseSchedule::lift(retract(x.gamma + alpha * d), S);
                const double fp = objective(probe);
                if (fp <= fx + opts.armijo_c * alpha * slope)
                {
                    x = std::move(probe);
                    fx = fp;
                    accepted = true;
                    break;
                }
                alpha *= opts.shrink;
            }
            if (!accepted && !steepest)
            {
                d = -g;
                slope = -g.squaredNorm();
                steepest = true;
            }
            else
                break;
        }
        if (!accepted)
        {
            st.line_search_failed = true;
            break;
        }

        st.objective_trace.push_back(fx);
        ++st.iterations;
        ++since_restart;

        const CMat g_new = riemannian_gradient(euclidean_gradient(x), x.gamma);
        const CMat g_old = riemannian_gradient(g, x.gamma);
        const CMat d_old = riemannian_gradient(d, x.gamma);
        double beta = inner(g_new, g_new - g_old) / std::max(g.squaredNorm(), 1e-300);
        if (beta < 0.0 || since_restart >= opts.restart_every)
        {
            beta = 0.0;
            since_restart = 0;
        }
        d = -g_new + beta * d_old;
        g = g_new;
    }
    st.gradient_norm = g.norm();
    if (st.gradient_norm <= tol)
        st.converged = true;
    return out;
}

} // namespace risce
