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

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace risce;

namespace
{

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string &s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

std::filesystem::path scratch_dir(const std::string &name)
{
    const auto d = std::filesystem::temp_directory_path() / ("risce_harness_" + name);
    std::filesystem::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("pilot split")
{
    CHECK(pilot_split(24, 4) == std::pair{30, 22});
    CHECK(pilot_split(16, 4) == std::pair{22, 14});
    CHECK(pilot_split(20, 1) == std::pair{20, 20});
    const auto [t1, tk] = pilot_split(24, 2);
    CHECK(t1 - tk == 8);
    CHECK((t1 + tk) / 2.0 == 24.0);
    CHECK_THROWS_AS(pilot_split(0, 4), ConfigError);
    CHECK_THROWS_AS(pilot_split(1, 4), ConfigError);

    SystemConfig c;
    c.set_average_pilot(16);
    CHECK(c.pilot_typical == 22);
    CHECK(c.pilot_other == 14);
}

TEST_CASE("config defaults and validation")
{
    const SystemConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.bs().size() == 64);
    CHECK(c.ris().size() == 16);
    CHECK(c.users == 4);
    CHECK(c.paths_L == 3);
    CHECK(c.paths_J == std::vector<int>{2, 2, 2, 2});
    CHECK(c.carrier_hz == 28e9);
    CHECK(c.pilot_typical >= c.pilot_other);
    CHECK(c.warnings().empty());

    SystemConfig bad = c;
    bad.pilot_other = 31;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.paths_J = {2, 2};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.users = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.ris_grid_h = 2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    SystemConfig shortp = c;
    shortp.pilot_other = 14;
    const auto w = shortp.warnings();
    REQUIRE(w.size() == 3);
    for (const auto &m : w)
        CHECK(m.rfind("PilotTooShort", 0) == 0);
}

TEST_CASE("config text")
{
    SystemConfig c;
    c.power_dbm = 15.0;
    c.paths_J = {1, 2, 3, 1};
    c.methods = {Method::mc_unaware, Method::sbl};
    c.on_grid = true;
    c.seed = 99;
    const std::string text = config_to_json_text(c);
    const SystemConfig back = config_from_json_text(text);
    CHECK(config_to_json_text(back) == text);
    CHECK(back.power_dbm == 15.0);
    CHECK(back.paths_J == c.paths_J);
    CHECK(back.methods == c.methods);
    CHECK(back.seed == 99);

    const SystemConfig partial = config_from_json_text(R"({"users": 2, "paths_J": [1, 1]})");
    CHECK(partial.users == 2);
    CHECK(partial.ris_count_h == 4);
    CHECK_THROWS_AS(config_from_json_text(R"({"userz": 2})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("{"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"pilot_other": 40})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"methods": ["magic"]})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/risce.json"), ConfigError);

    for (Method m : all_methods())
        CHECK(method_from_string(to_string(m)) == m);
}

TEST_CASE("sweep axes")
{
    const SystemConfig c;
    CHECK(apply_axis(c, "power", 5).power_dbm == 5.0);
    CHECK(apply_axis(c, "pilot", 16).pilot_other == 14);
    CHECK(apply_axis(c, "spacing", 1.0 / 6).ris_spacing == 1.0 / 6);
    CHECK(apply_axis(c, "ris_size", 6).ris().size() == 24);
    CHECK(apply_axis(c, "paths_L", 2).paths_L == 2);
    CHECK(apply_axis(c, "paths_J", 3).paths_J == std::vector<int>{3, 3, 3, 3});
    for (const char *axis : {"power", "pilot", "spacing", "ris_size", "paths_L", "paths_J"})
    {
        const auto v = default_axis_values(axis);
        CHECK(!v.empty());
        for (double x : v)
            CHECK_NOTHROW(apply_axis(c, axis, x).validate());
    }
    CHECK_THROWS_AS(apply_axis(c, "bandwidth", 1.0), ConfigError);
    CHECK_THROWS_AS(default_axis_values("bandwidth"), ConfigError);
}

TEST_CASE("summaries")
{
    const SweepPoint p = summarize("power", 25, Method::sbl, {0.01, 1.0, 0.1}, 1);
    CHECK(p.trials == 3);
    CHECK(p.failures == 1);
    CHECK(p.nmse_median == 0.1);
    CHECK(p.nmse_mean == doctest::Approx(0.37));
    CHECK(p.nmse_db_median == doctest::Approx(-10.0));
    const double sd = std::sqrt(((0.01 - 0.37) * (0.01 - 0.37) + 0.63 * 0.63 + 0.27 * 0.27) / 2.0);
    CHECK(p.nmse_se == doctest::Approx(sd / std::sqrt(3.0)));
    CHECK(summarize("power", 25, Method::sbl, {0.5, 0.25}, 0).nmse_median == 0.375);
}

TEST_CASE("trials")
{
    SystemCache cache;
    SystemConfig c;
    c.methods = {Method::proposed_rootmusic, Method::proposed_esprit, Method::mc_unaware, Method::non_optimized};
    const auto sys = cache.prepare(c);
    CHECK(cache.prepare(c).get() != nullptr);
    CHECK(sys->optimized.slots() == 30);
    CHECK(sys->bernoulli.slots() == 30);
    CHECK(sys->optimizer.objective_trace.back() < sys->optimizer.objective_trace.front());

    SUBCASE("same seed, same record")
    {
        const TrialRecord a = run_trial(*sys, 3);
        const TrialRecord b = run_trial(*sys, 3);
        REQUIRE(a.outcomes.size() == 4);
        for (const auto &[m, o] : a.outcomes)
        {
            CHECK(b.outcomes.at(m).nmse == o.nmse);
            CHECK(b.outcomes.at(m).failed == o.failed);
            CHECK(o.nmse >= 0.0);
        }
        const TrialRecord other = run_trial(*sys, 4);
        CHECK(other.outcomes.at(Method::proposed_rootmusic).nmse != a.outcomes.at(Method::proposed_rootmusic).nmse);
    }
    SUBCASE("noiseless on the grid")
    {
        SystemConfig q = c;
        q.on_grid = true;
        q.noise_bs_dbm = q.noise_ris_dbm = -400.0;
        q.methods = {Method::proposed_rootmusic, Method::proposed_esprit};
        const auto s = cache.prepare(q);
        for (int t = 0; t < 10; ++t)
        {
            const TrialRecord r = run_trial(*s, t);
            for (const auto &[m, o] : r.outcomes)
            {
                CHECK_FALSE(o.failed);
                CHECK(o.nmse <= 1e-6);
            }
        }
    }
    SUBCASE("a failing estimator is recorded, not thrown")
    {
        SystemConfig q = c;
        q.methods = {Method::direct_omp};
        q.memory_cap_mb = 1e-3;
        const TrialRecord r = run_trial(*cache.prepare(q), 0);
        const MethodOutcome &o = r.outcomes.at(Method::direct_omp);
        CHECK(o.failed);
        CHECK(o.nmse == 1.0);
        CHECK(!o.error.empty());
    }
}

TEST_CASE("proposed beats the coupling-unaware baseline on the default system")
{
    SystemConfig c;
    c.methods = {Method::proposed_rootmusic, Method::mc_unaware};
    std::vector<double> prop, unaware;
    SystemCache cache;
    const auto sys = cache.prepare(c);
    for (int t = 0; t < 200; ++t)
    {
        const TrialRecord r = run_trial(*sys, t);
        prop.push_back(r.outcomes.at(Method::proposed_rootmusic).nmse);
        unaware.push_back(r.outcomes.at(Method::mc_unaware).nmse);
    }
    const double mp = test::median(prop), mu = test::median(unaware);
    MESSAGE("median NMSE: proposed " << mp << ", coupling-unaware " << mu);
    CHECK(mp < mu);
}

TEST_CASE("sweeps and output files")
{
    SystemConfig c;
    c.trials = 3;
    c.methods = {Method::proposed_rootmusic, Method::mc_unaware};
    SystemCache cache;
    const auto values = default_axis_values("power");
    const SweepResult r = run_sweep(c, "power", values, &cache);
    REQUIRE(r.points.size() == values.size() * c.methods.size());
    for (const auto &p : r.points)
    {
        CHECK(p.trials == 3);
        CHECK(p.nmse_median >= 0.0);
        CHECK(p.nmse_db_median == doctest::Approx(10.0 * std::log10(p.nmse_median)));
    }

    // Fresh cache, same config: identical bytes.
    SystemCache fresh;
    CHECK(sweep_csv(run_sweep(c, "power", values, &fresh)) == sweep_csv(r));

    // Trials in reverse order aggregate to the same point.
    const auto sys = cache.prepare(apply_axis(c, "power", values[1]));
    std::vector<double> rev;
    for (int t = c.trials - 1; t >= 0; --t)
        rev.push_back(run_trial(*sys, t).outcomes.at(Method::mc_unaware).nmse);
    const SweepPoint again = summarize("power", values[1], Method::mc_unaware, rev, 0);
    const auto it = std::find_if(r.points.begin(), r.points.end(), [&](const SweepPoint &p) {
        return p.axis_value == values[1] && p.method == Method::mc_unaware;
    });
    REQUIRE(it != r.points.end());
    CHECK(again.nmse_median == it->nmse_median);
    CHECK(again.nmse_mean == it->nmse_mean);

    const auto dir = scratch_dir("emit");
    const auto files = emit(r, dir);
    REQUIRE(files.size() == 2);
    const std::string csv = slurp(files[0]);
    CHECK(csv == sweep_csv(r));
    CHECK(csv.rfind(kSweepCsvHeader, 0) == 0);
    CHECK(count_lines(csv) == 1 + static_cast<int>(values.size() * c.methods.size()));
    const std::string svg = slurp(files[1]);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("mc-unaware") != std::string::npos);

    SweepResult empty;
    empty.axis = "power";
    CHECK(sweep_csv(empty) == std::string(kSweepCsvHeader) + "\n");
    const auto efiles = emit(empty, dir / "empty");
    CHECK(slurp(efiles[0]) == std::string(kSweepCsvHeader) + "\n");

    SweepResult one;
    one.axis = "pilot";
    one.values = {24};
    one.points = {summarize("pilot", 24, Method::sbl, {0.5}, 0)};
    CHECK(count_lines(sweep_csv(one)) == 2);
    const std::string one_svg = sweep_svg(one);
    CHECK(one_svg.find("<circle") != std::string::npos);

    // A file where the directory should be.
    const auto blocker = dir / "blocker";
    std::ofstream(blocker) << "x";
    try
    {
        emit(r, blocker / "sub");
        FAIL("emit into a file path should throw");
    }
    catch (const Error &e)
    {
        CHECK(std::string(e.what()).find("blocker") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("matrix csv")
{
    const auto dir = scratch_dir("matrix");
    std::filesystem::create_directories(dir);
    CMat A(2, 2);
    A << cd{1, 2}, cd{3, 4}, cd{5, 6}, cd{7, -8};
    write_matrix_csv(A, dir / "a.csv", "m", "t");
    const std::string s = slurp(dir / "a.csv");
    CHECK(s.rfind("m,t,re,im\n", 0) == 0);
    CHECK(count_lines(s) == 5);
    CHECK(s.find("1,1,7,-8\n") != std::string::npos);
    std::filesystem::remove_all(dir);
}
