// Copyright 2026 The qudit-net Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qudit_net/results.hpp"
#include "qudit_net/sweep.hpp"
#include "test_util.hpp"

namespace qn {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qn_results_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ResultRow random_row(Rng& rng) {
  ResultRow r;
  r.m = 1 + static_cast<int>(rng() % 6);
  r.L_km = 100.0 * uniform01(rng);
  r.strategy = static_cast<Strategy>(rng() % 3);
  r.success_probability = uniform01(rng);
  r.average_attempts = 1.0 / (r.success_probability + 1e-3);
  r.average_fidelity = uniform01(rng);
  for (int p = 0; p < r.m; ++p) r.per_pair_fidelities.push_back(uniform01(rng) / 3.0);
  r.fidelity_stderr = 1e-3 * uniform01(rng);
  r.n_trajectories = static_cast<std::int64_t>(rng() % 1000000);
  r.seed = rng();
  r.wall_time_s = uniform01(rng);
  r.engine = rng() % 2 ? Engine::oracle : Engine::trajectory;
  return r;
}

TEST(Csv, HeaderColumnsInOrder) {
  EXPECT_EQ(csv_header(),
            "m,L_km,strategy,success_probability,average_attempts,average_fidelity,"
            "per_pair_fidelities,fidelity_stderr,n_trajectories,seed,wall_time_s,engine");
}

TEST(Csv, RowsRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const ResultRow r = random_row(rng);
    EXPECT_EQ(parse_row(format_row(r)), r);
  }
}

TEST(Csv, FileRoundTrip) {
  Rng rng(2);
  std::vector<ResultRow> rows;
  for (int i = 0; i < 20; ++i) rows.push_back(random_row(rng));
  const fs::path p = scratch("file") / "rows.csv";
  write_csv_atomic(p, rows);
  EXPECT_EQ(read_csv(p), rows);
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST(Csv, MalformedInputRejected) {
  EXPECT_THROW(parse_row("1,2,qudit"), ResultsIoError);
  EXPECT_THROW(read_csv("/nonexistent/dir/rows.csv"), ResultsIoError);
  const fs::path p = scratch("bad") / "rows.csv";
  std::ofstream(p) << "not,a,header\n";
  EXPECT_THROW(read_csv(p), ResultsIoError);
}

TEST(Sidecar, CarriesConfigAndRevision) {
  const auto cfg = validate_config("m = 3\n");
  const fs::path p = scratch("sidecar") / "results.json";
  write_sidecar(p, cfg, {}, SidecarTimings{});
  const auto j = nlohmann::json::parse(slurp(p));
  EXPECT_TRUE(j.contains("git_revision"));
  EXPECT_EQ(j["git_revision"].get<std::string>(), git_revision());
  EXPECT_EQ(j["config"]["m"]["value"], "3");
  EXPECT_EQ(j["config"]["m"]["provenance"], "user");
  EXPECT_EQ(j["config"]["switch.eta"]["provenance"], "published default");
}

SweepSpec small_spec() {
  SweepSpec s = validate_config(
                    "trajectories = 600\n"
                    "sweep.m_values = 1, 2\n"
                    "sweep.distances_km = 5, 15\n"
                    "sweep.strategies = qudit, qubit_one_shot\n")
                    .sweep;
  return s;
}

TEST(Sweep, IdealSinglePoint) {
  SweepSpec s = validate_config("gate.ideal = true\nswitch.eta = 1\nswitch.error = 0\n"
                                "detection.eta_lag = 0\ndetection.sigma_x_per_m = 0\n"
                                "source.sigma_a = 0\nsource.sigma_p = 0\ndistance_km = 0\n"
                                "channel.t1_s = inf\nchannel.tp_s = inf\ntrajectories = 200\n")
                    .sweep;
  const auto r = run_sweep(s, SweepOptions{});
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_NEAR(r.rows[0].average_fidelity, 1.0, 1e-12);
  EXPECT_EQ(r.rows[0].success_probability, 1.0);
}

TEST(Sweep, CampaignShapeCounts) {
  const auto s = validate_config("sweep.m_values = 2, 4, 5\n"
                                 "sweep.distances_km = 10, 20, 30, 40, 50, 60, 70, 80, 90, 100\n"
                                 "sweep.strategies = qudit, qubit_all_keep, qubit_one_shot\n")
                     .sweep;
  EXPECT_EQ(s.point_count(), 90u);
}

TEST(Sweep, ResumeSkipsCompletedKeys) {
  const fs::path csv = scratch("resume") / "results.csv";
  SweepSpec part = small_spec();
  part.m_values = {1};
  SweepOptions o;
  o.csv = csv;
  const auto first = run_sweep(part, o);
  EXPECT_EQ(first.computed, 4u);
  const auto second = run_sweep(small_spec(), o);
  EXPECT_EQ(second.skipped, 4u);
  EXPECT_EQ(second.computed, 4u);
  const auto rows = read_csv(csv);
  ASSERT_EQ(rows.size(), 8u);
  std::set<RowKey> keys;
  for (const auto& r : rows) EXPECT_TRUE(keys.insert(key_of(r)).second);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(),
                             [](const ResultRow& a, const ResultRow& b) { return key_of(a) < key_of(b); }));
  // Rows from the first run are kept verbatim.
  for (const auto& r : first.rows) EXPECT_NE(std::find(rows.begin(), rows.end(), r), rows.end());
}

TEST(Sweep, ByteIdenticalAcrossRunsAndThreads) {
  const fs::path a = scratch("det_a") / "results.csv";
  const fs::path b = scratch("det_b") / "results.csv";
  SweepOptions oa;
  oa.csv = a;
  run_sweep(small_spec(), oa);
  SweepOptions ob;
  ob.csv = b;
  ob.threads = 3;
  run_sweep(small_spec(), ob);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Sweep, OracleEngineRows) {
  SweepSpec s = validate_config("sweep.engine = oracle\nsweep.m_values = 1, 2\n").sweep;
  const auto r = run_sweep(s, SweepOptions{});
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.engine, Engine::oracle);
    EXPECT_EQ(row.n_trajectories, 0);
    EXPECT_GT(row.success_probability, 0.0);
  }
}

}  // namespace
}  // namespace qn
