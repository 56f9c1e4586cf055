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

#include "risce/protocol.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace risce
{

enum class Method
{
    proposed_rootmusic,
    proposed_esprit,
    mc_unaware,
    direct_omp,
    sbl,
    non_optimized
};

std::string to_string(Method m);
Method method_from_string(const std::string &name);
std::vector<Method> all_methods();

/// Experiment parameters. Field names double as config-file keys. Lengths of
/// the wire are in wavelengths; powers in dBm.
struct SystemConfig
{
    int bs_count_h = 8;
    int bs_count_v = 8;
    double bs_spacing = 0.5;
    int ris_count_h = 4;
    int ris_count_v = 4;
    double ris_spacing = 0.5;

    int users = 4;
    int paths_L = 3;
    std::vector<int> paths_J{2, 2, 2, 2};

    double power_dbm = 25.0;
    double noise_bs_dbm = -80.0;
    double noise_ris_dbm = -80.0;
    double carrier_hz = 28e9;
    double wire_length = 1.0 / 32.0;
    double wire_radius = 1.0 / 500.0;
    double z0 = 50.0;
    double distance_bs_ris = 100.0;
    double distance_ris_user = 10.0;

    int pilot_typical = 30; // tau_1
    int pilot_other = 22;   // tau_k, k >= 2

    int user_grid_v = 8;
    int user_grid_h = 8;
    int ris_grid_v = 8;
    int ris_grid_h = 8;
    int bs_grid_v = 8;
    int bs_grid_h = 8;

    bool on_grid = false;
    bool coupling = true; // false: S = 0
    int known_paths = 0;  // 0: MDL estimate
    int optimizer_iterations = 300;
    double memory_cap_mb = 1024.0;

    std::vector<Method> methods = all_methods();
    int trials = 200;
    std::uint64_t seed = 1;

    UpaGeometry bs() const { return {bs_count_h, bs_count_v, bs_spacing}; }
    UpaGeometry ris() const { return {ris_count_h, ris_count_v, ris_spacing}; }
    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    int pilot_length(int user) const { return user == 0 ? pilot_typical : pilot_other; }
    ChannelStatistics statistics() const;
    LinkBudget budget() const;
    EstimatorSettings estimator_settings() const;

    /// Throws ConfigError on inconsistent values.
    void validate() const;

    /// Soft checks that do not stop a run, e.g. "PilotTooShort: ..." when a
    /// non-typical user has fewer than J_k * ceil(log2(L * D_k)) slots.
    std::vector<std::string> warnings() const;

    /// Sets (tau_1, tau_k) for an average overhead T: tau_1 - tau_k = 8 and
    /// the mean over users equals T (tau_1 = T when there is one user).
    void set_average_pilot(int T);
};

/// Pilot lengths (tau_1, tau_k) for average overhead T over K users.
std::pair<int, int> pilot_split(int T, int users);

SystemConfig load_config(const std::filesystem::path &file);
SystemConfig config_from_json_text(const std::string &text);
std::string config_to_json_text(const SystemConfig &cfg);

/// Everything a trial needs that does not depend on the trial index.
struct PreparedSystem
{
    SystemConfig config;
    ScatteringModel scattering;
    PhaseSchedule optimized;     // tau_1 slots
    PhaseSchedule bernoulli;     // same initial matrix, not optimised
    OptimizerState optimizer;
};

/// Caches scattering models by geometry and schedules by (geometry, tau_1, seed).
class SystemCache
{
  public:
    std::shared_ptr<const PreparedSystem> prepare(const SystemConfig &cfg);

  private:
    std::map<std::string, ScatteringModel> scattering_;
    std::map<std::string, std::pair<PhaseSchedule, OptimizerState>> schedules_;
    std::map<std::string, PhaseSchedule> bernoulli_;
};

struct MethodOutcome
{
    double nmse = 1.0;
    bool failed = false;
    std::string error;
};

struct TrialRecord
{
    std::map<Method, MethodOutcome> outcomes;
    StageTiming timing; // proposed Root-MUSIC pipeline
};

TrialRecord run_trial(const PreparedSystem &sys, int trial);

struct SweepPoint
{
    std::string axis;
    double axis_value = 0.0;
    Method method = Method::proposed_rootmusic;
    int trials = 0;
    int failures = 0;
    double nmse_median = 0.0;
    double nmse_mean = 0.0;
    double nmse_se = 0.0;
    double nmse_db_median = 0.0;
};

struct SweepResult
{
    std::string axis;
    std::vector<double> values;
    std::vector<SweepPoint> points;
};

/// Applies one sweep value to a config. Axes: power, pilot, spacing,
/// ris_size, paths_L, paths_J.
SystemConfig apply_axis(SystemConfig cfg, const std::string &axis, double value);

/// Default values of each axis.
std::vector<double> default_axis_values(const std::string &axis);

/// Aggregates per-trial NMSE values of one method.
SweepPoint summarize(const std::string &axis, double value, Method method, const std::vector<double> &nmse,
                     int failures);

SweepResult run_sweep(const SystemConfig &cfg, const std::string &axis, const std::vector<double> &values,
                      SystemCache *cache = nullptr);

inline constexpr const char *kSweepCsvHeader =
    "axis,axis_value,method,trials,nmse_median,nmse_mean,nmse_se,nmse_db_median";

std::string sweep_csv(const SweepResult &result);
std::string sweep_svg(const SweepResult &result);

/// Writes sweep_<axis>.csv and sweep_<axis>.svg into out_dir (created if
/// needed). Returns the written paths.
std::vector<std::filesystem::path> emit(const SweepResult &result, const std::filesystem::path &out_dir);

/// Writes a complex matrix as row,col,re,im (or with custom index names).
void write_matrix_csv(const CMat &A, const std::filesystem::path &file, const std::string &row_name = "row",
                      const std::string &col_name = "col");

} // namespace risce
