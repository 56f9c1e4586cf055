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

#include "risce/subspace_doa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace risce
{

ReducedSnapshots dimension_reduce(const CMat &block, const UpaGeometry &bs, Axis axis)
{
    const int Nh = bs.count_h;
    const int Nv = bs.count_v;
    if (block.rows() != bs.size())
        throw ShapeMismatch("dimension_reduce: block rows differ from the array size");
    const Eigen::Index tau = block.cols();
    ReducedSnapshots out;
    out.axis = axis;
    if (axis == Axis::horizontal)
    {
        out.data.resize(Nh, Nv * tau);
        for (int v = 0; v < Nv; ++v)
            out.data.middleCols(v * tau, tau) = block.middleRows(v * Nh, Nh);
    }
    else
    {
        out.data.resize(Nv, Nh * tau);
        for (int h = 0; h < Nh; ++h)
            for (int v = 0; v < Nv; ++v)
                out.data.block(v, h * tau, 1, tau) = block.row(v * Nh + h);
    }
    return out;
}

CMat restore_block(const ReducedSnapshots &s, const UpaGeometry &bs)
{
    const int Nh = bs.count_h;
    const int Nv = bs.count_v;
    const Eigen::Index other = s.axis == Axis::horizontal ? Nv : Nh;
    const Eigen::Index rows = s.axis == Axis::horizontal ? Nh : Nv;
    if (s.data.rows() != rows || s.data.cols() % other != 0)
        throw ShapeMismatch("restore_block: snapshot shape does not match the array");
    const Eigen::Index tau = s.data.cols() / other;
    CMat block(bs.size(), tau);
    if (s.axis == Axis::horizontal)
        for (int v = 0; v < Nv; ++v)
            block.middleRows(v * Nh, Nh) = s.data.middleCols(v * tau, tau);
    else
        for (int h = 0; h < Nh; ++h)
            for (int v = 0; v < Nv; ++v)
                block.row(v * Nh + h) = s.data.block(v, h * tau, 1, tau);
    return block;
}

CMat sample_covariance(const CMat &Y)
{
    if (Y.cols() < 1)
        throw ShapeMismatch("sample_covariance: no snapshots");
    CMat R = (Y * Y.adjoint()) / static_cast<double>(Y.cols());
    return (R + R.adjoint()) / 2.0;
}

int estimate_source_count(const RVec &eig, int Q)
{
    const Eigen::Index n = eig.size();
    if (n < 2)
        return 1;
    const double trace = eig.sum();
    if (!(trace > 0.0))
        return 1;
    const RVec lam = eig.cwiseMax(1e-10 * trace);
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k)
    {
        const Eigen::Index m = n - k;
        const auto tail = lam.tail(m);
        const double arith = tail.mean();
        const double log_geo = tail.array().log().mean();
        const double val = -static_cast<double>(Q) * m * (log_geo - std::log(arith)) +
                           0.5 * k * (2.0 * n - k) * std::log(static_cast<double>(Q));
        if (val < best_val)
        {
            best_val = val;
            best = static_cast<int>(k);
        }
    }
    return std::clamp(best, 1, static_cast<int>(n) - 1);
}

namespace
{

double wrap_freq(double f)
{
    double w = f - std::floor(f + 0.5);
    if (w >= 0.5)
        w -= 1.0;
    return w;
}

struct Subspaces
{
    CMat signal;
    CMat noise;
};

Subspaces split_subspaces(const CMat &R, int L)
{
    const Eigen::Index n = R.rows();
    if (R.cols() != n)
        throw ShapeMismatch("covariance must be square");
    if (L < 1 || L >= n)
        throw ShapeMismatch("path count must satisfy 1 <= L < n");
    Eigen::SelfAdjointEigenSolver<CMat> es(R);
    const RVec ev = es.eigenvalues().reverse(); // descending
    const double trace = ev.sum();
    if (!(trace > 0.0) || ev(L - 1) - ev(L) < 1e-12 * trace)
        throw DegenerateSubspace("no eigenvalue gap after the requested source count");
    const CMat V = es.eigenvectors().rowwise().reverse();
    return {V.leftCols(L), V.rightCols(n - L)};
}

std::vector<double> sorted(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

std::vector<double> root_music(const CMat &R, int L)
{
    const Eigen::Index n = R.rows();
    const Subspaces sub = split_subspaces(R, L);
    const CMat C = sub.noise * sub.noise.adjoint();

    // a(f)^H C a(f) = sum_d c_d z^d with z = exp(-i 2 pi f) and d = q - p.
    const Eigen::Index deg = 2 * n - 2;
    CVec coeff = CVec::Zero(deg + 1); // coeff(j) multiplies z^j
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q)
            coeff(q - p + n - 1) += C(p, q);

    Eigen::Index top = deg;
    const double scale = coeff.cwiseAbs().maxCoeff();
    while (top > 0 && std::abs(coeff(top)) <= 1e-14 * scale)
        --top;
    Eigen::Index low = 0;
    while (low < top && std::abs(coeff(low)) <= 1e-14 * scale)
        ++low;
    const Eigen::Index m = top - low;
    if (m < L)
        throw DegenerateSubspace("root-MUSIC polynomial has too few roots");

    CMat comp = CMat::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j)
        comp(0, j) = -coeff(top - 1 - j) / coeff(top);
    for (Eigen::Index j = 1; j < m; ++j)
        comp(j, j - 1) = 1.0;
    Eigen::ComplexEigenSolver<CMat> ces(comp, false);
    std::vector<cd> roots;
    for (Eigen::Index j = 0; j < m; ++j)
    {
        cd z = ces.eigenvalues()(j);
        if (std::abs(z) > 1.0)
            z = 1.0 / std::conj(z);
        roots.push_back(z);
    }

    // Every root comes with its reflection; take the closest to the circle and
    // drop its partner before the next pick.
    std::vector<double> out;
    for (int l = 0; l < L && !roots.empty(); ++l)
    {
        auto it = std::min_element(roots.begin(), roots.end(), [](cd a, cd b) {
            return std::abs(1.0 - std::abs(a)) < std::abs(1.0 - std::abs(b));
        });
        const cd pick = *it;
        roots.erase(it);
        double phase = std::arg(pick);
        if (!roots.empty())
        {
            auto partner = std::min_element(roots.begin(), roots.end(), [&](cd a, cd b) {
                return std::abs(a - pick) < std::abs(b - pick);
            });
            // A noiseless source is a double root on the circle, which the
            // eigenvalue solver splits by about sqrt(eps) on either side.
            phase += 0.5 * std::arg(*partner / pick);
            roots.erase(partner);
        }
        out.push_back(wrap_freq(-phase / (2.0 * kPi)));
    }
    if (static_cast<int>(out.size()) != L)
        throw DegenerateSubspace("root-MUSIC found fewer roots than sources");
    return sorted(out);
}

std::vector<double> tls_esprit(const CMat &R, int L)
{
    const Eigen::Index n = R.rows();
    const Subspaces sub = split_subspaces(R, L);
    CMat E(n - 1, 2 * L);
    E.leftCols(L) = sub.signal.topRows(n - 1);
    E.rightCols(L) = sub.signal.bottomRows(n - 1);
    Eigen::SelfAdjointEigenSolver<CMat> es(E.adjoint() * E);
    const CMat V = es.eigenvectors().rowwise().reverse(); // descending eigenvalues
    const CMat V12 = V.block(0, L, L, L);
    const CMat V22 = V.block(L, L, L, L);
    Eigen::PartialPivLU<CMat> lu(V22);
    const CMat Psi = -V12 * lu.inverse();
    Eigen::ComplexEigenSolver<CMat> ces(Psi, false);
    std::vector<double> out;
    for (Eigen::Index j = 0; j < L; ++j)
        out.push_back(wrap_freq(-std::arg(ces.eigenvalues()(j)) / (2.0 * kPi)));
    return sorted(out);
}

namespace
{

std::vector<double> estimate_axis(const CMat &R, int L, DoaMethod method)
{
    return method == DoaMethod::root_music ? root_music(R, L) : tls_esprit(R, L);
}

double projection_energy(const CMat &A, const CMat &Y)
{
    Eigen::HouseholderQR<CMat> qr(A);
    const CMat Q = qr.householderQ() * CMat::Identity(A.rows(), A.cols());
    return (Q.adjoint() * Y).squaredNorm();
}

} // namespace

SteeringEstimate common_aoa(std::span<const CMat> blocks, const UpaGeometry &bs, DoaMethod method,
                            std::optional<int> known_paths)
{
    if (blocks.empty())
        throw ShapeMismatch("common_aoa: no pilot blocks");
    Eigen::Index total = 0;
    for (const auto &b : blocks)
    {
        if (b.rows() != bs.size())
            throw ShapeMismatch("common_aoa: block rows differ from the BS size");
        total += b.cols();
    }
    CMat Y(bs.size(), total);
    {
        Eigen::Index c = 0;
        for (const auto &b : blocks)
        {
            Y.middleCols(c, b.cols()) = b;
            c += b.cols();
        }
    }

    const CMat Rh = sample_covariance(dimension_reduce(Y, bs, Axis::horizontal).data);
    const CMat Rv = sample_covariance(dimension_reduce(Y, bs, Axis::vertical).data);

    int L = 0;
    if (known_paths)
        L = *known_paths;
    else
    {
        Eigen::SelfAdjointEigenSolver<CMat> eh(Rh, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<CMat> ev(Rv, Eigen::EigenvaluesOnly);
        const int Lh = bs.count_h > 1 ? estimate_source_count(eh.eigenvalues().reverse(),
                                                              static_cast<int>(bs.count_v * total))
                                      : 1;
        const int Lv = bs.count_v > 1 ? estimate_source_count(ev.eigenvalues().reverse(),
                                                              static_cast<int>(bs.count_h * total))
                                      : 1;
        L = std::max(Lh, Lv);
    }

    auto axis_freqs = [&](const CMat &R, int count) -> std::vector<double> {
        if (count == 1) // single element along this axis
            return std::vector<double>(static_cast<std::size_t>(L), 0.0);
        return estimate_axis(R, L, method);
    };
    SteeringEstimate est;
    est.freqs_h = axis_freqs(Rh, bs.count_h);
    est.freqs_v = axis_freqs(Rv, bs.count_v);
    est.path_count = L;

    std::vector<int> perm(static_cast<std::size_t>(L));
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    std::vector<SpatialAngle> trial(static_cast<std::size_t>(L));
    do
    {
        for (int l = 0; l < L; ++l)
            trial[static_cast<std::size_t>(l)] = {est.freqs_v[static_cast<std::size_t>(perm[static_cast<std::size_t>(l)])],
                                                  est.freqs_h[static_cast<std::size_t>(l)]};
        const double e = projection_energy(steering_matrix(bs, trial), Y);
        if (e > best)
        {
            best = e;
            est.angles = trial;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    est.steering = steering_matrix(bs, est.angles);
    return est;
}

} // namespace risce
