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

#include "risce/phase_design.hpp"
#include "risce/sparse_recovery.hpp"
#include "risce/subspace_doa.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace risce
{

/// Y_breve = ((1 / (N sqrt(p))) A_N^H Y)^H, tau x L.
CMat equivalent_measurement(const CMat &block, const CMat &bs_steering, double power);

/// Index of the column with the largest energy; ties go to the lowest index.
int select_reference(const CMat &equivalent);

/// tau x (D_user * D_ris) dictionary Theta^H (A_user^* (x) A_ris). Column
/// g_user * D_ris + g_ris.
CMat kron_dictionary(const CMat &lifted, const CMat &user_atoms, const CMat &ris_atoms);

/// conj(a_user) (x) a_ris, length M^2.
CVec kron_atom(const CVec &user_atom, const CVec &ris_atom);

/// One recovered cascaded column expressed in a Kronecker dictionary.
struct ColumnFit
{
    CVec column;                 // h_RIS,l, length M^2
    std::vector<int> user_index; // per selected atom, column of the user atom set
    std::vector<int> ris_index;  // per selected atom, column of the RIS atom set
    CVec coefficients;
};

/// Sparse fit of one equivalent-measurement column over Theta^H (A_user^* (x) A_ris).
/// Fits that share one RIS atom are tried first; the unrestricted fit is used
/// when no single RIS atom reaches the stop threshold and it does better.
ColumnFit fit_column(const CVec &measurement, const CMat &lifted, const CMat &user_atoms,
                     const CMat &ris_atoms, const StopRule &stop);

/// Reference-column recovery over the full user and RIS grids.
ColumnFit estimate_reference_column(const CVec &measurement, const CMat &lifted,
                                    const GridDictionary &user_dict, const GridDictionary &ris_dict,
                                    const StopRule &stop);

/// Rearranges h_RIS (M^2) so that each column depends on the user-side
/// steering only along `axis`: count_axis rows.
CMat user_axis_snapshots(const CVec &h_ris, const UpaGeometry &ris, Axis axis);

/// Per-axis user AoA frequencies from a recovered cascaded column, by joint
/// OMP against the conjugated axis dictionary. Empty for a zero column.
std::vector<double> extract_ris_aoa(const CVec &h_ris, const UpaGeometry &ris, Axis axis,
                                    int grid_size, const StopRule &stop);

/// Remaining columns (all l != r) over Theta^H (A_user_est^* (x) A_ris_grid).
std::vector<ColumnFit> estimate_remaining_columns(const CMat &equivalent, int reference,
                                                  const CMat &user_steering, const CMat &lifted,
                                                  const GridDictionary &ris_dict, const StopRule &stop);

/// Column l is the RIS atom with the largest coefficient in fit l. Throws
/// MissingSupport when a fit is empty.
CMat extract_common_aod(std::span<const ColumnFit> fits, const CMat &ris_atoms);

struct CascadedEstimate
{
    CMat bs_steering;              // N x L
    std::vector<CVec> ris_columns; // L vectors of length M^2 (M for the uncoupled model)
    CMat user_ris_steering;        // M x J
    std::vector<double> user_freqs_v;
    std::vector<double> user_freqs_h;
    CMat common_aod_steering; // M x L (typical user)
    CMat cascaded;            // N x M^2, or N x M for the uncoupled model
    bool conventional = false;
};

/// bs_steering [h_1 ... h_L]^H.
CMat assemble_cascaded(const CMat &bs_steering, std::span<const CVec> columns);

struct EstimatorSettings
{
    double power = 0.0;    // watts
    double noise_bs = 0.0; // watts, used for the OMP stopping threshold
    int user_grid_v = 8;
    int user_grid_h = 8;
    int ris_grid_v = 8;
    int ris_grid_h = 8;
    int bs_grid_v = 8; // Direct-OMP only
    int bs_grid_h = 8;
    std::vector<int> max_paths; // J_k per user; sparsity caps are J_k + 2
    std::size_t memory_cap_bytes = std::size_t{1} << 30;

    StopRule column_rule(int user, Eigen::Index slots, Eigen::Index bs_elements) const;
};

struct StageTiming
{
    double stage1 = 0.0;
    double stage2_reference = 0.0;
    double stage2 = 0.0;
    std::vector<double> stage3; // per user k >= 2
};

struct ProtocolResult
{
    SteeringEstimate aoa;
    std::vector<CascadedEstimate> users;
    StageTiming timing;
};

/// Stage II for the typical user (index 0).
CascadedEstimate stage2_estimate(const CMat &block, const SteeringEstimate &aoa,
                                 const PhaseSchedule &schedule, const UpaGeometry &ris,
                                 const EstimatorSettings &cfg, double *reference_seconds = nullptr);

/// Stage III for user `user` >= 1, reusing the common AoD of Stage II.
CascadedEstimate stage3_estimate(const CMat &block, const SteeringEstimate &aoa,
                                 const CMat &common_aod, const PhaseSchedule &schedule,
                                 const UpaGeometry &ris, const EstimatorSettings &cfg, int user);

/// Full three-stage estimator over all users.
ProtocolResult estimate_mc_aware(std::span<const CMat> blocks, std::span<const PhaseSchedule> schedules,
                                 const UpaGeometry &bs, const UpaGeometry &ris, DoaMethod method,
                                 const EstimatorSettings &cfg, std::optional<int> known_paths = std::nullopt);

/// Difference-angle grid per axis: (-2 + 2g/D) * spacing for g in [0, 2D),
/// deduplicated modulo one.
std::vector<double> difference_grid(int D, double spacing);

/// Steering vectors on the product of the vertical and horizontal difference grids.
GridDictionary difference_dictionary(const UpaGeometry &ris, int D_v, int D_h);

/// Coupling-unaware estimator on the conventional schedules (gamma only).
std::vector<CascadedEstimate> mc_unaware_estimate(std::span<const CMat> blocks,
                                                  std::span<const PhaseSchedule> schedules,
                                                  const SteeringEstimate &aoa, const UpaGeometry &ris,
                                                  const EstimatorSettings &cfg);

/// OMP on vec(Y) over the implicit dictionary sqrt(p) (Theta^T (x) I_N) times
/// the (BS x user x RIS) grid, sparsity cap L^2 J.
CascadedEstimate direct_omp_estimate(const CMat &block, const PhaseSchedule &schedule,
                                     const UpaGeometry &bs, const UpaGeometry &ris,
                                     const EstimatorSettings &cfg, int user, int paths_L);

/// Equivalent measurements recovered column by column with SBL over the full
/// Kronecker dictionary.
std::vector<CascadedEstimate> sbl_estimate(std::span<const CMat> blocks,
                                           std::span<const PhaseSchedule> schedules,
                                           const SteeringEstimate &aoa, const UpaGeometry &ris,
                                           const EstimatorSettings &cfg);

/// sqrt(p) G_hat Theta; uses `lifted` for coupling-aware estimates and
/// `gamma` for uncoupled ones.
CMat reconstruct_received(const CascadedEstimate &est, const PhaseSchedule &schedule, double power);

/// sum_k ||Y_hat_k - Y_bar_k||^2 / sum_k ||Y_bar_k||^2.
double nmse(std::span<const CMat> reconstructed, std::span<const CMat> noise_free);

} // namespace risce
