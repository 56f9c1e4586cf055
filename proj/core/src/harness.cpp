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

#include "risce/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace risce
{

namespace
{

const std::pair<Method, const char *> kMethodNames[] = {
    {Method::proposed_rootmusic, "proposed-rootmusic"},
    {Method::proposed_esprit, "proposed-esprit"},
    {Method::mc_unaware, "mc-unaware"},
    {Method::direct_omp, "direct-omp"},
    {Method::sbl, "sbl"},
    {Method::non_optimized, "non-optimized-phases"},
};

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

std::string to_string(Method m)
{
    for (const auto &[k, name] : kMethodNames)
        if (k == m)
            return name;
    return "unknown";
}

Method method_from_string(const std::string &name)
{
    for (const auto &[k, n] : kMethodNames)
        if (name == n)
            return k;
    throw ConfigError("unknown method '" + name + "'");
}

std::vector<Method> all_methods()
{
    std::vector<Method> v;
    for (const auto &entry : kMethodNames)
        v.push_back(entry.first);
    return v;
}

// ---- config ------------------------------------------------------------

ChannelStatistics SystemConfig::statistics() const
{
    ChannelStatistics s;
    s.bs = bs();
    s.ris = ris();
    s.paths_L = paths_L;
    s.paths_J = paths_J;
    s.distance_bs_ris = distance_bs_ris;
    s.distance_ris_user = distance_ris_user;
    s.on_grid = on_grid;
    s.ris_grid_v = ris_grid_v;
    s.ris_grid_h = ris_grid_h;
    return s;
}

LinkBudget SystemConfig::budget() const
{
    return {dbm_to_watt(power_dbm), dbm_to_watt(noise_bs_dbm), dbm_to_watt(noise_ris_dbm)};
}

EstimatorSettings SystemConfig::estimator_settings() const
{
    EstimatorSettings e;
    e.power = dbm_to_watt(power_dbm);
    e.noise_bs = dbm_to_watt(noise_bs_dbm);
    e.user_grid_v = user_grid_v;
    e.user_grid_h = user_grid_h;
    e.ris_grid_v = ris_grid_v;
    e.ris_grid_h = ris_grid_h;
    e.bs_grid_v = bs_grid_v;
    e.bs_grid_h = bs_grid_h;
    e.max_paths = paths_J;
    e.memory_cap_bytes = static_cast<std::size_t>(memory_cap_mb * 1024.0 * 1024.0);
    return e;
}

void SystemConfig::validate() const
{
    bs().validate();
    ris().validate();
    if (users < 1)
        throw ConfigError("users must be positive");
    if (paths_L < 1)
        throw ConfigError("paths_L must be positive");
    if (static_cast<int>(paths_J.size()) != users)
        throw ConfigError("paths_J needs one entry per user");
    if (std::any_of(paths_J.begin(), paths_J.end(), [](int j) { return j < 1; }))
        throw ConfigError("paths_J entries must be positive");
    if (pilot_other < 1 || pilot_typical < pilot_other)
        throw ConfigError("pilot lengths must satisfy pilot_typical >= pilot_other >= 1");
    if (user_grid_v < ris_count_v || user_grid_h < ris_count_h || ris_grid_v < ris_count_v ||
        ris_grid_h < ris_count_h || bs_grid_v < bs_count_v || bs_grid_h < bs_count_h)
        throw ConfigError("dictionary resolutions must be at least the array sizes");
    if (!(carrier_hz > 0.0) || !(wire_length > 0.0) || !(wire_radius > 0.0) || !(z0 > 0.0))
        throw ConfigError("carrier, wire dimensions and z0 must be positive");
    if (!(distance_bs_ris > 0.0) || !(distance_ris_user > 0.0))
        throw ConfigError("distances must be positive");
    if (trials < 1)
        throw ConfigError("trials must be positive");
    if (known_paths < 0)
        throw ConfigError("known_paths must be nonnegative");
    if (methods.empty())
        throw ConfigError("no methods selected");
}

std::vector<std::string> SystemConfig::warnings() const
{
    std::vector<std::string> out;
    const int L = known_paths > 0 ? known_paths : paths_L;
    const double atoms = static_cast<double>(L) * user_grid_v * user_grid_h;
    const int bits = static_cast<int>(std::ceil(std::log2(atoms)));
    for (int k = 1; k < users && k < static_cast<int>(paths_J.size()); ++k)
    {
        const int need = paths_J[static_cast<std::size_t>(k)] * bits;
        if (pilot_other < need)
            out.push_back("PilotTooShort: user " + std::to_string(k + 1) + " has " + std::to_string(pilot_other) +
                          " pilot slots, fewer than " + std::to_string(need));
    }
    return out;
}

std::pair<int, int> pilot_split(int T, int users)
{
    if (users < 1 || T < 1)
        throw ConfigError("pilot split needs positive T and user count");
    if (users == 1)
        return {T, T};
    const int other = static_cast<int>(std::lround(T - 8.0 / users));
    if (other < 1)
        throw ConfigError("average pilot overhead too small for the fixed typical-user surplus");
    return {other + 8, other};
}

void SystemConfig::set_average_pilot(int T)
{
    std::tie(pilot_typical, pilot_other) = pilot_split(T, users);
}

namespace
{

template <typename T> void read(const nlohmann::json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

SystemConfig config_from_json_text(const std::string &text)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");

    static const char *known[] = {
        "bs_count_h", "bs_count_v", "bs_spacing", "ris_count_h", "ris_count_v", "ris_spacing", "users",
        "paths_L", "paths_J", "power_dbm", "noise_bs_dbm", "noise_ris_dbm", "carrier_hz", "wire_length",
        "wire_radius", "z0", "distance_bs_ris", "distance_ris_user", "pilot_typical", "pilot_other",
        "user_grid_v", "user_grid_h", "ris_grid_v", "ris_grid_h", "bs_grid_v", "bs_grid_h", "on_grid",
        "coupling", "known_paths", "optimizer_iterations", "memory_cap_mb", "methods", "trials", "seed"};
    for (const auto &item : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char *k) { return item.key() == k; }) ==
            std::end(known))
            throw ConfigError("unknown config key '" + item.key() + "'");

    SystemConfig c;
    try
    {
        read(j, "bs_count_h", c.bs_count_h);
        read(j, "bs_count_v", c.bs_count_v);
        read(j, "bs_spacing", c.bs_spacing);
        read(j, "ris_count_h", c.ris_count_h);
        read(j, "ris_count_v", c.ris_count_v);
        read(j, "ris_spacing", c.ris_spacing);
        read(j, "users", c.users);
        read(j, "paths_L", c.paths_L);
        read(j, "power_dbm", c.power_dbm);
        read(j, "noise_bs_dbm", c.noise_bs_dbm);
        read(j, "noise_ris_dbm", c.noise_ris_dbm);
        read(j, "carrier_hz", c.carrier_hz);
        read(j, "wire_length", c.wire_length);
        read(j, "wire_radius", c.wire_radius);
        read(j, "z0", c.z0);
        read(j, "distance_bs_ris", c.distance_bs_ris);
        read(j, "distance_ris_user", c.distance_ris_user);
        read(j, "pilot_typical", c.pilot_typical);
        read(j, "pilot_other", c.pilot_other);
        read(j, "user_grid_v", c.user_grid_v);
        read(j, "user_grid_h", c.user_grid_h);
        read(j, "ris_grid_v", c.ris_grid_v);
        read(j, "ris_grid_h", c.ris_grid_h);
        read(j, "bs_grid_v", c.bs_grid_v);
        read(j, "bs_grid_h", c.bs_grid_h);
        read(j, "on_grid", c.on_grid);
        read(j, "coupling", c.coupling);
        read(j, "known_paths", c.known_paths);
        read(j, "optimizer_iterations", c.optimizer_iterations);
        read(j, "memory_cap_mb", c.memory_cap_mb);
        read(j, "trials", c.trials);
        read(j, "seed", c.seed);

        // A scalar J applies to every user.
        if (j.contains("paths_J"))
        {
            if (j["paths_J"].is_array())
                c.paths_J = j["paths_J"].get<std::vector<int>>();
            else
                c.paths_J.assign(static_cast<std::size_t>(c.users), j["paths_J"].get<int>());
        }
        else
            c.paths_J.assign(static_cast<std::size_t>(c.users), 2);

        if (j.contains("methods"))
        {
            c.methods.clear();
            for (const auto &m : j["methods"])
                c.methods.push_back(method_from_string(m.get<std::string>()));
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    c.validate();
    return c;
}

std::string config_to_json_text(const SystemConfig &c)
{
    nlohmann::json j;
    j["bs_count_h"] = c.bs_count_h;
    j["bs_count_v"] = c.bs_count_v;
    j["bs_spacing"] = c.bs_spacing;
    j["ris_count_h"] = c.ris_count_h;
    j["ris_count_v"] = c.ris_count_v;
    j["ris_spacing"] = c.ris_spacing;
    j["users"] = c.users;
    j["paths_L"] = c.paths_L;
    j["paths_J"] = c.paths_J;
    j["power_dbm"] = c.power_dbm;
    j["noise_bs_dbm"] = c.noise_bs_dbm;
    j["noise_ris_dbm"] = c.noise_ris_dbm;
    j["carrier_hz"] = c.carrier_hz;
    j["wire_length"] = c.wire_length;
    j["wire_radius"] = c.wire_radius;
    j["z0"] = c.z0;
    j["distance_bs_ris"] = c.distance_bs_ris;
    j["distance_ris_user"] = c.distance_ris_user;
    j["pilot_typical"] = c.pilot_typical;
    j["pilot_other"] = c.pilot_other;
    j["user_grid_v"] = c.user_grid_v;
    j["user_grid_h"] = c.user_grid_h;
    j["ris_grid_v"] = c.ris_grid_v;
    j["ris_grid_h"] = c.ris_grid_h;
    j["bs_grid_v"] = c.bs_grid_v;
    j["bs_grid_h"] = c.bs_grid_h;
    j["on_grid"] = c.on_grid;
    j["coupling"] = c.coupling;
    j["known_paths"] = c.known_paths;
    j["optimizer_iterations"] = c.optimizer_iterations;
    j["memory_cap_mb"] = c.memory_cap_mb;
    std::vector<std::string> m;
    for (auto x : c.methods)
        m.push_back(to_string(x));
    j["methods"] = m;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    return j.dump(2);
}

SystemConfig load_config(const std::filesystem::path &file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open config file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

// ---- preparation ---------------------------------------------------------

namespace
{

std::string scattering_key(const SystemConfig &c)
{
    return num(c.ris_count_h) + "|" + num(c.ris_count_v) + "|" + num(c.ris_spacing) + "|" + num(c.wire_length) +
           "|" + num(c.wire_radius) + "|" + num(c.carrier_hz) + "|" + num(c.z0) + "|" + (c.coupling ? "1" : "0");
}

ScatteringModel build_scattering(const SystemConfig &c)
{
    if (!c.coupling)
        return uncoupled_model(c.ris().size(), c.z0);
    const double lam = c.wavelength();
    const WireGeometry g = WireGeometry::on_upa(c.ris(), lam, c.wire_length * lam, c.wire_radius * lam);
    return scattering_model(g, c.z0);
}

} // namespace

std::shared_ptr<const PreparedSystem> SystemCache::prepare(const SystemConfig &cfg)
{
    cfg.validate();
    auto sys = std::make_shared<PreparedSystem>();
    sys->config = cfg;

    const std::string skey = scattering_key(cfg);
    auto sit = scattering_.find(skey);
    if (sit == scattering_.end())
        sit = scattering_.emplace(skey, build_scattering(cfg)).first;
    sys->scattering = sit->second;

    const std::string tkey = skey + "|" + num(cfg.pilot_typical) + "|" + std::to_string(cfg.seed) + "|" +
                             num(cfg.optimizer_iterations);
    auto bit = bernoulli_.find(tkey);
    if (bit == bernoulli_.end())
    {
        Rng rng = make_rng(cfg.seed, {0xB3u});
        const CMat g0 = bernoulli_phases(cfg.ris().size(), cfg.pilot_typical, rng);
        bit = bernoulli_.emplace(tkey, PhaseSchedule::lift(g0, sys->scattering.scattering)).first;
    }
    sys->bernoulli = bit->second;

    auto oit = schedules_.find(tkey);
    if (oit == schedules_.end())
    {
        OptimizerOptions opts;
        opts.max_iter = cfg.optimizer_iterations;
        OptimizedSchedule o = optimize(sys->bernoulli, opts);
        oit = schedules_.emplace(tkey, std::make_pair(std::move(o.schedule), o.state)).first;
    }
    sys->optimized = oit->second.first;
    sys->optimizer = oit->second.second;
    return sys;
}

// ---- trials --------------------------------------------------------------

namespace
{

struct BlockSet
{
    std::vector<PhaseSchedule> schedules;
    std::vector<CMat> received;
    std::vector<CMat> noise_free;
};

BlockSet synthesize(const PreparedSystem &sys, const PhaseSchedule &base, const CMat &H,
                    const std::vector<CVec> &h, int trial)
{
    const SystemConfig &c = sys.config;
    const LinkBudget budget = c.budget();
    Rng rng = make_rng(c.seed, {static_cast<std::uint64_t>(trial), 2u});
    BlockSet set;
    for (int k = 0; k < c.users; ++k)
    {
        set.schedules.push_back(base.truncated(c.pilot_length(k)));
        const CMat &lifted = set.schedules.back().lifted;
        set.received.push_back(synthesize_received(H, h[static_cast<std::size_t>(k)], lifted, budget, k, rng).samples);
        set.noise_free.push_back(noise_free_block(H, h[static_cast<std::size_t>(k)], lifted, budget.power));
    }
    return set;
}

double score(const std::vector<CascadedEstimate> &est, const BlockSet &set, double power)
{
    std::vector<CMat> rec;
    for (std::size_t k = 0; k < est.size(); ++k)
        rec.push_back(reconstruct_received(est[k], set.schedules[k], power));
    return nmse(rec, set.noise_free);
}

template <typename F> void guarded(TrialRecord &rec, Method m, F &&f)
{
    MethodOutcome out;
    try
    {
        out.nmse = f();
        if (!std::isfinite(out.nmse))
            throw Error("non-finite NMSE");
    }
    catch (const std::exception &e)
    {
        out.nmse = 1.0;
        out.failed = true;
        out.error = e.what();
    }
    rec.outcomes[m] = out;
}

} // namespace

TrialRecord run_trial(const PreparedSystem &sys, int trial)
{
    const SystemConfig &c = sys.config;
    const UpaGeometry bs = c.bs();
    const UpaGeometry ris = c.ris();
    Rng rng = make_rng(c.seed, {static_cast<std::uint64_t>(trial), 1u});
    const ChannelRealization real = sample_realization(c.statistics(), rng);
    const CMat H = build_ris_bs_channel(bs, ris, real);
    std::vector<CVec> h;
    for (int k = 0; k < c.users; ++k)
        h.push_back(build_user_ris_channel(ris, real, k));

    const EstimatorSettings es = c.estimator_settings();
    const double power = es.power;
    std::optional<int> known;
    if (c.known_paths > 0)
        known = c.known_paths;

    auto wants = [&](Method m) { return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end(); };
    TrialRecord rec;

    const bool need_opt = std::any_of(c.methods.begin(), c.methods.end(), [](Method m) { return m != Method::non_optimized; });
    BlockSet opt;
    if (need_opt)
        opt = synthesize(sys, sys.optimized, H, h, trial);

    std::optional<SteeringEstimate> rm_aoa;
    auto root_music_aoa = [&]() -> const SteeringEstimate & {
        if (!rm_aoa)
            rm_aoa = common_aoa(opt.received, bs, DoaMethod::root_music, known);
        return *rm_aoa;
    };

    if (wants(Method::proposed_rootmusic))
        guarded(rec, Method::proposed_rootmusic, [&] {
            ProtocolResult r = estimate_mc_aware(opt.received, opt.schedules, bs, ris, DoaMethod::root_music, es, known);
            rm_aoa = r.aoa;
            rec.timing = r.timing;
            return score(r.users, opt, power);
        });
    if (wants(Method::proposed_esprit))
        guarded(rec, Method::proposed_esprit, [&] {
            ProtocolResult r = estimate_mc_aware(opt.received, opt.schedules, bs, ris, DoaMethod::esprit, es, known);
            return score(r.users, opt, power);
        });
    if (wants(Method::mc_unaware))
        guarded(rec, Method::mc_unaware, [&] {
            return score(mc_unaware_estimate(opt.received, opt.schedules, root_music_aoa(), ris, es), opt, power);
        });
    if (wants(Method::direct_omp))
        guarded(rec, Method::direct_omp, [&] {
            std::vector<CascadedEstimate> est;
            for (int k = 0; k < c.users; ++k)
                est.push_back(direct_omp_estimate(opt.received[static_cast<std::size_t>(k)],
                                                  opt.schedules[static_cast<std::size_t>(k)], bs, ris, es, k, c.paths_L));
            return score(est, opt, power);
        });
    if (wants(Method::sbl))
        guarded(rec, Method::sbl, [&] {
            return score(sbl_estimate(opt.received, opt.schedules, root_music_aoa(), ris, es), opt, power);
        });
    if (wants(Method::non_optimized))
        guarded(rec, Method::non_optimized, [&] {
            const BlockSet raw = synthesize(sys, sys.bernoulli, H, h, trial);
            ProtocolResult r = estimate_mc_aware(raw.received, raw.schedules, bs, ris, DoaMethod::root_music, es, known);
            return score(r.users, raw, power);
        });
    return rec;
}

// ---- sweeps --------------------------------------------------------------

SystemConfig apply_axis(SystemConfig cfg, const std::string &axis, double value)
{
    if (axis == "power")
        cfg.power_dbm = value;
    else if (axis == "pilot")
        cfg.set_average_pilot(static_cast<int>(std::lround(value)));
    else if (axis == "spacing")
        cfg.ris_spacing = value;
    else if (axis == "ris_size")
    {
        cfg.ris_count_h = static_cast<int>(std::lround(value));
        cfg.user_grid_h = cfg.ris_grid_h = 2 * cfg.ris_count_h;
    }
    else if (axis == "paths_L")
        cfg.paths_L = static_cast<int>(std::lround(value));
    else if (axis == "paths_J")
        cfg.paths_J.assign(static_cast<std::size_t>(cfg.users), static_cast<int>(std::lround(value)));
    else
        throw ConfigError("unknown sweep axis '" + axis + "'");
    return cfg;
}

std::vector<double> default_axis_values(const std::string &axis)
{
    if (axis == "power")
        return {5, 15, 25, 35};
    if (axis == "pilot")
        return {16, 20, 24, 28};
    if (axis == "spacing")
        return {1.0 / 2, 1.0 / 3, 1.0 / 6, 1.0 / 12};
    if (axis == "ris_size")
        return {2, 4, 6, 8};
    if (axis == "paths_L")
        return {1, 2, 3, 4};
    if (axis == "paths_J")
        return {1, 2, 3};
    throw ConfigError("unknown sweep axis '" + axis + "'");
}

SweepPoint summarize(const std::string &axis, double value, Method method, const std::vector<double> &v,
                     int failures)
{
    SweepPoint p;
    p.axis = axis;
    p.axis_value = value;
    p.method = method;
    p.trials = static_cast<int>(v.size());
    p.failures = failures;
    if (v.empty())
        return p;
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    p.nmse_median = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    p.nmse_mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
    if (n > 1)
    {
        double ss = 0.0;
        for (double x : s)
            ss += (x - p.nmse_mean) * (x - p.nmse_mean);
        p.nmse_se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }
    p.nmse_db_median = 10.0 * std::log10(std::max(p.nmse_median, 1e-300));
    return p;
}

SweepResult run_sweep(const SystemConfig &cfg, const std::string &axis, const std::vector<double> &values,
                      SystemCache *cache)
{
    SystemCache local;
    SystemCache &c = cache ? *cache : local;
    SweepResult res;
    res.axis = axis;
    res.values = values;
    for (double value : values)
    {
        const auto sys = c.prepare(apply_axis(cfg, axis, value));
        std::map<Method, std::vector<double>> samples;
        std::map<Method, int> failures;
        for (int t = 0; t < sys->config.trials; ++t)
        {
            const TrialRecord rec = run_trial(*sys, t);
            for (const auto &[m, o] : rec.outcomes)
            {
                samples[m].push_back(o.nmse);
                failures[m] += o.failed ? 1 : 0;
            }
        }
        for (Method m : sys->config.methods)
            res.points.push_back(summarize(axis, value, m, samples[m], failures[m]));
    }
    return res;
}

// ---- output --------------------------------------------------------------

std::string sweep_csv(const SweepResult &r)
{
    std::string out = std::string(kSweepCsvHeader) + "\n";
    for (const auto &p : r.points)
        out += p.axis + "," + num(p.axis_value) + "," + to_string(p.method) + "," + std::to_string(p.trials) + "," +
               num(p.nmse_median) + "," + num(p.nmse_mean) + "," + num(p.nmse_se) + "," + num(p.nmse_db_median) +
               "\n";
    return out;
}

std::string sweep_svg(const SweepResult &r)
{
    const double W = 720, Hh = 440, left = 70, right = 190, top = 30, bottom = 60;
    const double pw = W - left - right, ph = Hh - top - bottom;
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    double xmin = 0, xmax = 1, ymin = -1, ymax = 0;
    if (!r.points.empty())
    {
        xmin = xmax = r.points.front().axis_value;
        ymin = ymax = r.points.front().nmse_db_median;
        for (const auto &p : r.points)
        {
            xmin = std::min(xmin, p.axis_value);
            xmax = std::max(xmax, p.axis_value);
            ymin = std::min(ymin, p.nmse_db_median);
            ymax = std::max(ymax, p.nmse_db_median);
        }
    }
    if (xmax - xmin < 1e-12)
    {
        xmin -= 1;
        xmax += 1;
    }
    if (ymax - ymin < 1e-9)
    {
        ymin -= 1;
        ymax += 1;
    }
    ymin = std::floor(ymin / 5) * 5;
    ymax = std::ceil(ymax / 5) * 5;
    auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double y = ymin; y <= ymax + 1e-9; y += 5)
    {
        s << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << Y(y) << "\" y2=\"" << Y(y)
          << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << left - 6 << "\" y=\"" << Y(y) + 4 << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
    }
    for (double x : r.values)
        s << "<text x=\"" << X(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << num(x)
          << "</text>\n";
    s << "<text x=\"" << left + pw / 2 << "\" y=\"" << Hh - 15 << "\" text-anchor=\"middle\">" << r.axis
      << "</text>\n";
    s << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">NMSE (dB)</text>\n";

    std::vector<Method> order;
    for (const auto &p : r.points)
        if (std::find(order.begin(), order.end(), p.method) == order.end())
            order.push_back(p.method);
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        const char *col = colors[i % std::size(colors)];
        std::string pts;
        for (const auto &p : r.points)
            if (p.method == order[i])
            {
                pts += num(X(p.axis_value)) + "," + num(Y(p.nmse_db_median)) + " ";
                s << "<circle cx=\"" << X(p.axis_value) << "\" cy=\"" << Y(p.nmse_db_median) << "\" r=\"3.5\" fill=\""
                  << col << "\"/>\n";
            }
        s << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.8\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(i);
        s << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 34 << "\" y1=\"" << ly << "\" y2=\"" << ly
          << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        s << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly + 4 << "\">" << to_string(order[i]) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

namespace
{

void write_file(const std::filesystem::path &p, const std::string &text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw Error("cannot write " + p.string());
    out << text;
    if (!out)
        throw Error("write failed for " + p.string());
}

} // namespace

std::vector<std::filesystem::path> emit(const SweepResult &r, const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error("cannot create " + dir.string() + ": " + ec.message());
    const std::string stem = "sweep_" + (r.axis.empty() ? std::string("empty") : r.axis);
    const auto csv = dir / (stem + ".csv");
    const auto svg = dir / (stem + ".svg");
    write_file(csv, sweep_csv(r));
    write_file(svg, sweep_svg(r));
    return {csv, svg};
}

void write_matrix_csv(const CMat &A, const std::filesystem::path &file, const std::string &row_name,
                      const std::string &col_name)
{
    std::string text = row_name + "," + col_name + ",re,im\n";
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            text += std::to_string(i) + "," + std::to_string(j) + "," + num(A(i, j).real()) + "," +
                    num(A(i, j).imag()) + "\n";
    write_file(file, text);
}

} // namespace risce
