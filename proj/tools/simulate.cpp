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

// Command-line driver: Monte Carlo sweeps, single verbose trials, impedance
// dumps and phase-schedule design.

#include "risce/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace
{

using namespace risce;

SystemConfig config_or_default(const std::string &path)
{
    SystemConfig cfg = path.empty() ? SystemConfig{} : load_config(path);
    for (const auto &w : cfg.warnings())
        std::cerr << "warning: " << w << "\n";
    return cfg;
}

std::vector<double> parse_values(const std::string &text)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos)
            next = text.size();
        const std::string item = text.substr(pos, next - pos);
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size())
            throw ConfigError("cannot parse sweep value '" + item + "'");
        out.push_back(v);
        pos = next + 1;
    }
    return out;
}

int cmd_sweep(const std::string &config, const std::string &axis, const std::string &out, int trials,
              long long seed, const std::string &values)
{
    SystemConfig cfg = config_or_default(config);
    if (trials > 0)
        cfg.trials = trials;
    if (seed >= 0)
        cfg.seed = static_cast<std::uint64_t>(seed);
    const auto vals = values.empty() ? default_axis_values(axis) : parse_values(values);
    const SweepResult r = run_sweep(cfg, axis, vals);
    for (const auto &p : r.points)
        std::printf("%-8s %10.4g  %-22s %5.1f dB  (%d trials, %d failed)\n", axis.c_str(), p.axis_value,
                    to_string(p.method).c_str(), p.nmse_db_median, p.trials, p.failures);
    for (const auto &f : emit(r, out))
        std::cout << "wrote " << f.string() << "\n";
    return 0;
}

int cmd_estimate(const std::string &config, long long seed, int trial)
{
    SystemConfig cfg = config_or_default(config);
    if (seed >= 0)
        cfg.seed = static_cast<std::uint64_t>(seed);
    SystemCache cache;
    const auto sys = cache.prepare(cfg);
    std::printf("RIS %dx%d, BS %dx%d, K=%d, L=%d, tau=(%d,%d), p=%.1f dBm\n", cfg.ris_count_h, cfg.ris_count_v,
                cfg.bs_count_h, cfg.bs_count_v, cfg.users, cfg.paths_L, cfg.pilot_typical, cfg.pilot_other,
                cfg.power_dbm);
    const auto &os = sys->optimizer;
    if (!os.objective_trace.empty())
        std::printf("phase design: %.6g -> %.6g in %d iterations%s\n", os.objective_trace.front(),
                    os.objective_trace.back(), os.iterations, os.converged ? " (converged)" : "");
    const TrialRecord rec = run_trial(*sys, trial);
    for (const auto &[m, o] : rec.outcomes)
    {
        std::printf("%-22s NMSE %.4e (%.2f dB)", to_string(m).c_str(), o.nmse, 10.0 * std::log10(o.nmse));
        if (o.failed)
            std::printf("  failed: %s", o.error.c_str());
        std::printf("\n");
    }
    const auto &t = rec.timing;
    if (t.stage2 > 0.0)
    {
        std::printf("timing: stage I %.3f ms, stage II ref %.3f ms, stage II %.3f ms", 1e3 * t.stage1,
                    1e3 * t.stage2_reference, 1e3 * t.stage2);
        for (std::size_t k = 0; k < t.stage3.size(); ++k)
            std::printf(", stage III user %zu %.3f ms", k + 2, 1e3 * t.stage3[k]);
        std::printf("\n");
    }
    return 0;
}

int cmd_impedance(const std::string &config, const std::string &out)
{
    const SystemConfig cfg = config_or_default(config);
    const double lam = cfg.wavelength();
    const WireGeometry g = WireGeometry::on_upa(cfg.ris(), lam, cfg.wire_length * lam, cfg.wire_radius * lam);
    const double gain = sine_normalization_gain(g);
    if (gain > 1e6)
        std::cerr << "warning: sine normalisation amplifies the kernel by " << gain << "\n";
    const ScatteringModel sm = scattering_model(g, cfg.z0);
    std::filesystem::create_directories(out);
    write_matrix_csv(sm.impedance, std::filesystem::path(out) / "impedance.csv");
    write_matrix_csv(sm.scattering, std::filesystem::path(out) / "scattering.csv");
    const cd z = sm.impedance(0, 0);
    std::printf("Z[0,0] = %.6g %+.6gj ohm, sine gain %.4g, |S - diag S| / |S| = %.3e\n", z.real(), z.imag(), gain,
                (sm.scattering - CMat(sm.scattering.diagonal().asDiagonal())).norm() / sm.scattering.norm());
    std::cout << "wrote " << out << "/impedance.csv and " << out << "/scattering.csv\n";
    return 0;
}

int cmd_design(const std::string &config, const std::string &out)
{
    const SystemConfig cfg = config_or_default(config);
    SystemCache cache;
    const auto sys = cache.prepare(cfg);
    const auto &os = sys->optimizer;
    if (!os.objective_trace.empty())
        std::printf("objective %.6g -> %.6g, %d iterations, gradient norm %.3e%s\n", os.objective_trace.front(),
                    os.objective_trace.back(), os.iterations, os.gradient_norm,
                    os.line_search_failed ? " (line search failed)" : "");
    const std::filesystem::path file(out);
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    write_matrix_csv(sys->optimized.gamma, file, "m", "t");
    std::cout << "wrote " << file.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"RIS channel estimation with mutual coupling: simulations and utilities"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string axis;
    std::string values;
    int trials = 0;
    int trial = 0;
    long long seed = -1;

    auto *sweep = app.add_subcommand("sweep", "Monte Carlo NMSE sweep over one axis");
    sweep->add_option("--config", config, "JSON config file (defaults when omitted)");
    sweep->add_option("--axis", axis, "power, pilot, spacing, ris_size, paths_L or paths_J")->required();
    sweep->add_option("--out", out, "output directory")->required();
    sweep->add_option("--trials", trials, "trials per point (overrides the config)");
    sweep->add_option("--seed", seed, "base seed (overrides the config)");
    sweep->add_option("--values", values, "comma-separated axis values");

    auto *est = app.add_subcommand("estimate", "run one trial and print per-method NMSE");
    est->add_option("--config", config, "JSON config file");
    est->add_option("--seed", seed, "base seed");
    est->add_option("--trial", trial, "trial index");

    auto *imp = app.add_subcommand("impedance", "dump the RIS impedance and scattering matrices");
    imp->add_option("--config", config, "JSON config file");
    imp->add_option("--out", out, "output directory")->default_val(".");

    auto *des = app.add_subcommand("design-phases", "optimise the training phases and write them as CSV");
    des->add_option("--config", config, "JSON config file");
    des->add_option("--out", out, "output CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sweep)
            return cmd_sweep(config, axis, out, trials, seed, values);
        if (*est)
            return cmd_estimate(config, seed, trial);
        if (*imp)
            return cmd_impedance(config, out);
        if (*des)
            return cmd_design(config, out);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
