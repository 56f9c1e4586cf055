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

#include "risce/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace risce
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Column indices sorted by decreasing energy, ties by index.
std::vector<int> energy_order(const CMat &Y)
{
    std::vector<int> idx(static_cast<std::size_t>(Y.cols()));
    std::iota(idx.begin(), idx.end(), 0);
    const RVec e = Y.colwise().squaredNorm().transpose();
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return e(a) > e(b); });
    return idx;
}

} // namespace

CMat equivalent_measurement(const CMat &block, const CMat &bs_steering, double power)
{
    if (block.rows() != bs_steering.rows())
        throw ShapeMismatch("equivalent_measurement: steering rows differ from block rows");
    if (!(power > 0.0))
        throw ConfigError("equivalent_measurement: transmit power must be positive");
    const double scale = 1.0 / (static_cast<double>(block.rows()) * std::sqrt(power));
    return (scale * (bs_steering.adjoint() * block)).adjoint();
}

int select_reference(const CMat &Y)
{
    if (Y.cols() < 1)
        throw ShapeMismatch("select_reference: no columns");
    return energy_order(Y).front();
}

CMat kron_dictionary(const CMat &lifted, const CMat &U, const CMat &Rm)
{
    const Eigen::Index M = U.rows();
    if (Rm.rows() != M || lifted.rows() != M * M)
        throw ShapeMismatch("kron_dictionary: atom sizes do not match the schedule");
    const Eigen::Index D1 = U.cols();
    const Eigen::Index D2 = Rm.cols();
    CMat out(lifted.cols(), D1 * D2);
    const CMat RmH = Rm.adjoint();
    for (Eigen::Index t = 0; t < lifted.cols(); ++t)
    {
        const auto B = Eigen::Map<const CMat>(lifted.col(t).data(), M, M);
        const CMat C = RmH * (B * U); // D2 x D1
        out.row(t) = Eigen::Map<const CVec>(C.data(), D1 * D2).conjugate().transpose();
    }
    return out;
}

CVec kron_atom(const CVec &user_atom, const CVec &ris_atom)
{
    const Eigen::Index M = user_atom.size();
    CVec v(M * ris_atom.size());
    for (Eigen::Index j = 0; j < M; ++j)
        v.segment(j * ris_atom.size(), ris_atom.size()) = std::conj(user_atom(j)) * ris_atom;
    return v;
}

namespace
{

// Best fit that uses a single RIS atom: per RIS atom, a sparse fit over the
// user atoms alone. Support indices refer to the full dictionary.
SparseSolution single_aod_fit(const CMat &D, Eigen::Index D1, Eigen::Index D2, const CVec &y, const StopRule &stop)
{
    SparseSolution best;
    double best_res = std::numeric_limits<double>::infinity();
    CMat Dg(D.rows(), D1);
    for (Eigen::Index g = 0; g < D2; ++g)
    {
        for (Eigen::Index j = 0; j < D1; ++j)
            Dg.col(j) = D.col(j * D2 + g);
        SparseSolution sol = omp_exchange(Dg, y, stop);
        if (sol.support.empty() || !(sol.residual_norm < best_res * (1.0 - 1e-9)))
            continue;
        best_res = sol.residual_norm;
        for (auto &idx : sol.support)
            idx = static_cast<int>(idx * D2 + g);
        best = std::move(sol);
    }
    return best;
}

} // namespace

ColumnFit fit_column(const CVec &y, const CMat &lifted, const CMat &U, const CMat &Rm, const StopRule &stop)
{
    const CMat D = kron_dictionary(lifted, U, Rm);
    const Eigen::Index M = U.rows();
    const Eigen::Index D2 = Rm.cols();
    // One BS path per column, so one RIS AoD. The unrestricted fit is the
    // fallback when a single atom cannot reach the threshold (off-grid leakage).
    SparseSolution sol = single_aod_fit(D, U.cols(), D2, y, stop);
    const double thr = stop.threshold(y.squaredNorm());
    if (sol.support.empty() || sol.residual_norm * sol.residual_norm > thr)
    {
        SparseSolution full = omp_exchange(D, y, stop);
        if (sol.support.empty() || full.residual_norm < sol.residual_norm)
            sol = std::move(full);
    }
    ColumnFit fit;
    fit.column = CVec::Zero(M * M);
    fit.coefficients = sol.coefficients;
    for (std::size_t i = 0; i < sol.support.size(); ++i)
    {
        const int g1 = static_cast<int>(sol.support[i] / D2);
        const int g2 = static_cast<int>(sol.support[i] % D2);
        fit.user_index.push_back(g1);
        fit.ris_index.push_back(g2);
        fit.column += sol.coefficients(static_cast<Eigen::Index>(i)) * kron_atom(U.col(g1), Rm.col(g2));
    }
    return fit;
}

ColumnFit estimate_reference_column(const CVec &y, const CMat &lifted, const GridDictionary &user_dict,
                                    const GridDictionary &ris_dict, const StopRule &stop)
{
    return fit_column(y, lifted, user_dict.atoms, ris_dict.atoms, stop);
}

CMat user_axis_snapshots(const CVec &h, const UpaGeometry &ris, Axis axis)
{
    const int Mh = ris.count_h;
    const int Mv = ris.count_v;
    const int M = ris.size();
    if (h.size() != static_cast<Eigen::Index>(M) * M)
        throw ShapeMismatch("user_axis_snapshots: length must be M^2");
    if (axis == Axis::horizontal)
    {
        CMat Y(Mh, M * Mv);
        for (int v = 0; v < Mv; ++v)
            for (int hh = 0; hh < Mh; ++hh)
                for (int m = 0; m < M; ++m)
                    Y(hh, v * M + m) = h((v * Mh + hh) * M + m);
        return Y;
    }
    CMat Y(Mv, M * Mh);
    for (int hh = 0; hh < Mh; ++hh)
        for (int v = 0; v < Mv; ++v)
            for (int m = 0; m < M; ++m)
                Y(v, hh * M + m) = h((v * Mh + hh) * M + m);
    return Y;
}

std::vector<double> extract_ris_aoa(const CVec &h, const UpaGeometry &ris, Axis axis, int grid_size,
                                    const StopRule &stop)
{
    const CMat Y = user_axis_snapshots(h, ris, axis);
    const int count = axis == Axis::horizontal ? ris.count_h : ris.count_v;
    const CMat Xi = axis_dictionary(count, grid_size, ris.spacing).conjugate();
    const JointSparseSolution sol = somp(Xi, Y, stop);
    std::vector<double> f;
    for (int g : sol.support)
        f.push_back(grid_freq(g, grid_size, ris.spacing));
    std::sort(f.begin(), f.end());
    return f;
}

std::vector<ColumnFit> estimate_remaining_columns(const CMat &Yb, int reference, const CMat &user_steering,
                                                  const CMat &lifted, const GridDictionary &ris_dict,
                                                  const StopRule &stop)
{
    std::vector<ColumnFit> out;
    if (Yb.cols() <= 1)
        return out;
    for (Eigen::Index l = 0; l < Yb.cols(); ++l)
        if (l != reference)
            out.push_back(fit_column(Yb.col(l), lifted, user_steering, ris_dict.atoms, stop));
    return out;
}

CMat extract_common_aod(std::span<const ColumnFit> fits, const CMat &ris_atoms)
{
    CMat A(ris_atoms.rows(), static_cast<Eigen::Index>(fits.size()));
    for (std::size_t l = 0; l < fits.size(); ++l)
    {
        const auto &f = fits[l];
        if (f.ris_index.empty())
            throw MissingSupport("common AoD: column " + std::to_string(l) + " has no atom");
        Eigen::Index best = 0;
        f.coefficients.cwiseAbs().maxCoeff(&best);
        A.col(static_cast<Eigen::Index>(l)) = ris_atoms.col(f.ris_index[static_cast<std::size_t>(best)]);
    }
    return A;
}

CMat assemble_cascaded(const CMat &bs_steering, std::span<const CVec> columns)
{
    if (static_cast<Eigen::Index>(columns.size()) != bs_steering.cols())
        throw ShapeMismatch("assemble_cascaded: column count differs from the steering matrix");
    if (columns.empty())
        return CMat::Zero(bs_steering.rows(), 0);
    CMat Hr(columns.front().size(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t l = 0; l < columns.size(); ++l)
        Hr.col(static_cast<Eigen::Index>(l)) = columns[l];
    return bs_steering * Hr.adjoint();
}

StopRule EstimatorSettings::column_rule(int user, Eigen::Index slots, Eigen::Index bs_elements) const
{
    StopRule s;
    s.noise_energy = power > 0.0 ? static_cast<double>(slots) * noise_bs / (static_cast<double>(bs_elements) * power)
                                 : 0.0;
    const int J = user < static_cast<int>(max_paths.size()) ? max_paths[static_cast<std::size_t>(user)] : 2;
    s.max_sparsity = J + 2;
    s.min_sparsity = 1;
    return s;
}

namespace
{

StopRule extraction_rule(const StopRule &column)
{
    StopRule s;
    s.floor = 1e-9;
    s.max_sparsity = column.max_sparsity;
    s.min_sparsity = 1;
    return s;
}

// Reference column with fallback to the next strongest column on an empty fit.
std::pair<int, ColumnFit> reference_fit(const CMat &Yb, const CMat &lifted, const CMat &U, const CMat &Rm,
                                        const StopRule &stop)
{
    for (int r : energy_order(Yb))
    {
        ColumnFit fit = fit_column(Yb.col(r), lifted, U, Rm, stop);
        if (!fit.user_index.empty())
            return {r, std::move(fit)};
    }
    throw MissingSupport("no equivalent-measurement column produced a sparse fit");
}

CMat distinct_user_atoms(const ColumnFit &fit, const CMat &user_atoms)
{
    std::vector<int> seen;
    for (int g : fit.user_index)
        if (std::find(seen.begin(), seen.end(), g) == seen.end())
            seen.push_back(g);
    CMat A(user_atoms.rows(), static_cast<Eigen::Index>(seen.size()));
    for (std::size_t i = 0; i < seen.size(); ++i)
        A.col(static_cast<Eigen::Index>(i)) = user_atoms.col(seen[i]);
    return A;
}

// Ordered list of fits by cascaded column index.
std::vector<ColumnFit> merge_fits(int reference, ColumnFit ref, std::vector<ColumnFit> rest)
{
    std::vector<ColumnFit> all;
    std::size_t j = 0;
    for (int l = 0; l < static_cast<int>(rest.size()) + 1; ++l)
        all.push_back(l == reference ? std::move(ref) : std::move(rest[j++]));
    return all;
}

CascadedEstimate finish(const SteeringEstimate &aoa, const std::vector<ColumnFit> &fits, CMat user_steering,
                        const ColumnFit &ref_fit, const UpaGeometry &ris, const EstimatorSettings &cfg,
                        const StopRule &stop)
{
    CascadedEstimate est;
    est.bs_steering = aoa.steering;
    for (const auto &f : fits)
        est.ris_columns.push_back(f.column);
    est.user_ris_steering = std::move(user_steering);
    const StopRule xr = extraction_rule(stop);
    est.user_freqs_h = extract_ris_aoa(ref_fit.column, ris, Axis::horizontal, cfg.user_grid_h, xr);
    est.user_freqs_v = extract_ris_aoa(ref_fit.column, ris, Axis::vertical, cfg.user_grid_v, xr);
    est.cascaded = assemble_cascaded(est.bs_steering, est.ris_columns);
    return est;
}

} // namespace

CascadedEstimate stage2_estimate(const CMat &block, const SteeringEstimate &aoa, const PhaseSchedule &schedule,
                                 const UpaGeometry &ris, const EstimatorSettings &cfg, double *reference_seconds)
{
    const CMat Yb = equivalent_measurement(block, aoa.steering, cfg.power);
    const StopRule stop = cfg.column_rule(0, block.cols(), block.rows());

    const auto t0 = Clock::now();
    const GridDictionary user_dict = grid_dictionary(ris, cfg.user_grid_v, cfg.user_grid_h);
    const GridDictionary ris_dict = grid_dictionary(ris, cfg.ris_grid_v, cfg.ris_grid_h);
    auto [r, ref] = reference_fit(Yb, schedule.lifted, user_dict.atoms, ris_dict.atoms, stop);
    if (reference_seconds)
        *reference_seconds = seconds_since(t0);

    CMat AU = distinct_user_atoms(ref, user_dict.atoms);
    auto rest = estimate_remaining_columns(Yb, r, AU, schedule.lifted, ris_dict, stop);
    const ColumnFit ref_copy = ref;
    const auto fits = merge_fits(r, std::move(ref), std::move(rest));

    CascadedEstimate est = finish(aoa, fits, std::move(AU), ref_copy, ris, cfg, stop);
    est.common_aod_steering = extract_common_aod(fits, ris_dict.atoms);
    return est;
}

CascadedEstimate stage3_estimate(const CMat &block, const SteeringEstimate &aoa, const CMat &common_aod,
                                 const PhaseSchedule &schedule, const UpaGeometry &ris,
                                 const EstimatorSettings &cfg, int user)
{
    const CMat Yb = equivalent_measurement(block, aoa.steering, cfg.power);
    const StopRule stop = cfg.column_rule(user, block.cols(), block.rows());
    const GridDictionary user_dict = grid_dictionary(ris, cfg.user_grid_v, cfg.user_grid_h);
    auto [r, ref] = reference_fit(Yb, schedule.lifted, user_dict.atoms, common_aod, stop);

    CMat AU = distinct_user_atoms(ref, user_dict.atoms);
    const GridDictionary ris_dict = grid_dictionary(ris, cfg.ris_grid_v, cfg.ris_grid_h);
    auto rest = estimate_remaining_columns(Yb, r, AU, schedule.lifted, ris_dict, stop);
    const ColumnFit ref_copy = ref;
    const auto fits = merge_fits(r, std::move(ref), std::move(rest));
    return finish(aoa, fits, std::move(AU), ref_copy, ris, cfg, stop);
}

ProtocolResult estimate_mc_aware(std::span<const CMat> blocks, std::span<const PhaseSchedule> schedules,
                                 const UpaGeometry &bs, const UpaGeometry &ris, DoaMethod method,
                                 const EstimatorSettings &cfg, std::optional<int> known_paths)
{
    if (blocks.size() != schedules.size() || blocks.empty())
        throw ShapeMismatch("estimate_mc_aware: one schedule per pilot block required");
    ProtocolResult res;
    auto t0 = Clock::now();
    res.aoa = common_aoa(blocks, bs, method, known_paths);
    res.timing.stage1 = seconds_since(t0);

    t0 = Clock::now();
    res.users.push_back(stage2_estimate(blocks[0], res.aoa, schedules[0], ris, cfg, &res.timing.stage2_reference));
    res.timing.stage2 = seconds_since(t0);

    const CMat aod = res.users.front().common_aod_steering;
    for (std::size_t k = 1; k < blocks.size(); ++k)
    {
        t0 = Clock::now();
        res.users.push_back(stage3_estimate(blocks[k], res.aoa, aod, schedules[k], ris, cfg, static_cast<int>(k)));
        res.timing.stage3.push_back(seconds_since(t0));
    }
    return res;
}

std::vector<double> difference_grid(int D, double spacing)
{
    std::vector<double> out;
    for (int g = 0; g < 2 * D; ++g)
    {
        const double f = (-2.0 + 2.0 * g / D) * spacing;
        const bool dup = std::any_of(out.begin(), out.end(), [&](double o) {
            const double d = std::abs(o - f);
            return std::abs(d - std::round(d)) < 1e-12;
        });
        if (!dup)
            out.push_back(f);
    }
    return out;
}

GridDictionary difference_dictionary(const UpaGeometry &ris, int D_v, int D_h)
{
    const auto gv = difference_grid(D_v, ris.spacing);
    const auto gh = difference_grid(D_h, ris.spacing);
    GridDictionary d;
    d.D_v = static_cast<int>(gv.size());
    d.D_h = static_cast<int>(gh.size());
    d.atoms.resize(ris.size(), d.D_v * d.D_h);
    for (int v = 0; v < d.D_v; ++v)
        for (int h = 0; h < d.D_h; ++h)
        {
            const SpatialAngle a{gv[static_cast<std::size_t>(v)], gh[static_cast<std::size_t>(h)]};
            d.grid.push_back(a);
            d.atoms.col(v * d.D_h + h) = steering_vector(ris, a);
        }
    return d;
}

std::vector<CascadedEstimate> mc_unaware_estimate(std::span<const CMat> blocks,
                                                  std::span<const PhaseSchedule> schedules,
                                                  const SteeringEstimate &aoa, const UpaGeometry &ris,
                                                  const EstimatorSettings &cfg)
{
    if (blocks.size() != schedules.size())
        throw ShapeMismatch("mc_unaware_estimate: one schedule per pilot block required");
    const GridDictionary diff = difference_dictionary(ris, cfg.ris_grid_v, cfg.ris_grid_h);
    std::vector<CascadedEstimate> out;
    for (std::size_t k = 0; k < blocks.size(); ++k)
    {
        const CMat Yb = equivalent_measurement(blocks[k], aoa.steering, cfg.power);
        const CMat D = schedules[k].gamma.adjoint() * diff.atoms;
        const StopRule stop = cfg.column_rule(static_cast<int>(k), blocks[k].cols(), blocks[k].rows());
        CascadedEstimate est;
        est.conventional = true;
        est.bs_steering = aoa.steering;
        for (Eigen::Index l = 0; l < Yb.cols(); ++l)
        {
            const SparseSolution sol = omp_exchange(D, Yb.col(l), stop);
            CVec h = CVec::Zero(ris.size());
            for (std::size_t i = 0; i < sol.support.size(); ++i)
                h += sol.coefficients(static_cast<Eigen::Index>(i)) * diff.atoms.col(sol.support[i]);
            est.ris_columns.push_back(std::move(h));
        }
        est.cascaded = assemble_cascaded(est.bs_steering, est.ris_columns);
        out.push_back(std::move(est));
    }
    return out;
}

CascadedEstimate direct_omp_estimate(const CMat &block, const PhaseSchedule &schedule, const UpaGeometry &bs,
                                     const UpaGeometry &ris, const EstimatorSettings &cfg, int user, int paths_L)
{
    const Eigen::Index N = block.rows();
    const Eigen::Index tau = block.cols();
    if (N != bs.size() || schedule.lifted.cols() != tau)
        throw ShapeMismatch("direct_omp_estimate: block does not match the schedule or BS size");
    const GridDictionary bs_dict = grid_dictionary(bs, cfg.bs_grid_v, cfg.bs_grid_h);
    const GridDictionary user_dict = grid_dictionary(ris, cfg.user_grid_v, cfg.user_grid_h);
    const GridDictionary ris_dict = grid_dictionary(ris, cfg.ris_grid_v, cfg.ris_grid_h);
    const Eigen::Index Gn = bs_dict.atoms.cols();
    const Eigen::Index D2 = ris_dict.atoms.cols();
    const Eigen::Index G = user_dict.atoms.cols() * D2;

    const std::size_t working = static_cast<std::size_t>((Gn + tau) * G) * sizeof(cd);
    if (working > cfg.memory_cap_bytes)
        throw DictionaryTooLarge("Direct-OMP working set of " + std::to_string(working) +
                                 " bytes exceeds the memory cap");

    // W(t, g) = a_ris^H B_t a_user: slot response of Kronecker atom g.
    const CMat W = kron_dictionary(schedule.lifted, user_dict.atoms, ris_dict.atoms).conjugate();
    const CMat Wc = W.conjugate();
    const RVec wnorm = W.colwise().norm().transpose();
    const double amp = std::sqrt(cfg.power);

    const int J = user < static_cast<int>(cfg.max_paths.size()) ? cfg.max_paths[static_cast<std::size_t>(user)] : 2;
    StopRule stop;
    stop.noise_energy = static_cast<double>(N * tau) * cfg.noise_bs;
    stop.max_sparsity = paths_L * paths_L * J;

    const CVec y = Eigen::Map<const CVec>(block.data(), N * tau);
    const double energy = y.squaredNorm();
    const double thr = stop.threshold(energy);

    CascadedEstimate est;
    est.cascaded = CMat::Zero(N, static_cast<Eigen::Index>(ris.size()) * ris.size());
    if (energy == 0.0)
        return est;

    std::vector<std::pair<Eigen::Index, Eigen::Index>> support;
    CMat Phi(N * tau, 0);
    CVec coef;
    CMat R = block;
    while (static_cast<int>(support.size()) < stop.max_sparsity && R.squaredNorm() > thr)
    {
        const CMat corr = (bs_dict.atoms.adjoint() * R) * Wc; // Gn x G
        Eigen::Index bn = -1, bg = -1;
        double best = -1.0;
        for (Eigen::Index g = 0; g < G; ++g)
        {
            if (wnorm(g) == 0.0)
                continue;
            for (Eigen::Index n = 0; n < Gn; ++n)
            {
                const double v = std::abs(corr(n, g)) / wnorm(g);
                if (v > best * (1.0 + 1e-12) &&
                    std::find(support.begin(), support.end(), std::make_pair(n, g)) == support.end())
                {
                    best = v;
                    bn = n;
                    bg = g;
                }
            }
        }
        if (bn < 0)
            break;
        support.emplace_back(bn, bg);
        Phi.conservativeResize(Eigen::NoChange, Phi.cols() + 1);
        CMat atom = amp * bs_dict.atoms.col(bn) * W.col(bg).transpose();
        Phi.rightCols(1) = Eigen::Map<const CVec>(atom.data(), N * tau);
        coef = Phi.colPivHouseholderQr().solve(y);
        const CVec r = y - Phi * coef;
        R = Eigen::Map<const CMat>(r.data(), N, tau);
    }

    for (std::size_t i = 0; i < support.size(); ++i)
    {
        const auto [n, g] = support[i];
        const CVec x = kron_atom(user_dict.atoms.col(g / D2).conjugate(), ris_dict.atoms.col(g % D2).conjugate());
        est.cascaded += coef(static_cast<Eigen::Index>(i)) * bs_dict.atoms.col(n) * x.transpose();
    }
    return est;
}

std::vector<CascadedEstimate> sbl_estimate(std::span<const CMat> blocks, std::span<const PhaseSchedule> schedules,
                                           const SteeringEstimate &aoa, const UpaGeometry &ris,
                                           const EstimatorSettings &cfg)
{
    if (blocks.size() != schedules.size())
        throw ShapeMismatch("sbl_estimate: one schedule per pilot block required");
    const GridDictionary user_dict = grid_dictionary(ris, cfg.user_grid_v, cfg.user_grid_h);
    const GridDictionary ris_dict = grid_dictionary(ris, cfg.ris_grid_v, cfg.ris_grid_h);
    const Eigen::Index D2 = ris_dict.atoms.cols();
    std::vector<CascadedEstimate> out;
    for (std::size_t k = 0; k < blocks.size(); ++k)
    {
        const CMat Yb = equivalent_measurement(blocks[k], aoa.steering, cfg.power);
        const CMat D = kron_dictionary(schedules[k].lifted, user_dict.atoms, ris_dict.atoms);
        CascadedEstimate est;
        est.bs_steering = aoa.steering;
        for (Eigen::Index l = 0; l < Yb.cols(); ++l)
        {
            const SparseSolution sol = sbl_recover(D, Yb.col(l));
            CVec h = CVec::Zero(ris.size() * ris.size());
            for (std::size_t i = 0; i < sol.support.size(); ++i)
            {
                const int g = sol.support[i];
                h += sol.coefficients(static_cast<Eigen::Index>(i)) *
                     kron_atom(user_dict.atoms.col(g / D2), ris_dict.atoms.col(g % D2));
            }
            est.ris_columns.push_back(std::move(h));
        }
        est.cascaded = assemble_cascaded(est.bs_steering, est.ris_columns);
        out.push_back(std::move(est));
    }
    return out;
}

CMat reconstruct_received(const CascadedEstimate &est, const PhaseSchedule &schedule, double power)
{
    const CMat &Theta = est.conventional ? schedule.gamma : schedule.lifted;
    if (est.cascaded.cols() != Theta.rows())
        throw ShapeMismatch("reconstruct_received: estimate does not match the schedule");
    return std::sqrt(power) * est.cascaded * Theta;
}

double nmse(std::span<const CMat> reconstructed, std::span<const CMat> noise_free)
{
    if (reconstructed.size() != noise_free.size())
        throw ShapeMismatch("nmse: user counts differ");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < reconstructed.size(); ++k)
    {
        if (reconstructed[k].rows() != noise_free[k].rows() || reconstructed[k].cols() != noise_free[k].cols())
            throw ShapeMismatch("nmse: block shapes differ");
        num += (reconstructed[k] - noise_free[k]).squaredNorm();
        den += noise_free[k].squaredNorm();
    }
    if (den == 0.0)
        return num == 0.0 ? 0.0 : 1.0;
    return num / den;
}

} // namespace risce
