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

// qudit-net: run, check and compare entanglement-distribution sweeps.
//
// Exit codes: 0 success, 1 configuration error, 2 estimation failure (no
// heralds), 3 I/O error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qudit_net/config.hpp"
#include "qudit_net/oracle.hpp"
#include "qudit_net/results.hpp"
#include "qudit_net/sweep.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kEstimation = 2, kIo = 3 };

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trajectories;
  std::optional<int> threads;
  bool explain = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_out) {
  cmd->add_option("--config", f.config_path, "Configuration file (key = value lines)");
  if (with_out) cmd->add_option("--out", f.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Override the seed");
  cmd->add_option("--trajectories", f.trajectories, "Override trajectories per point");
  cmd->add_option("--threads", f.threads, "Worker threads");
  cmd->add_flag("--explain", f.explain, "Print every field with its provenance");
}

qn::ResolvedConfig load(const CommonFlags& f) {
  std::string text;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw qn::ResultsIoError("cannot read config " + f.config_path);
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }
  std::vector<std::pair<std::string, std::string>> overrides;
  if (f.seed) overrides.emplace_back("seed", std::to_string(*f.seed));
  if (f.trajectories) overrides.emplace_back("trajectories", std::to_string(*f.trajectories));
  if (f.threads) overrides.emplace_back("threads", std::to_string(*f.threads));
  return qn::validate_config(text, overrides);
}

void print_row(const qn::ResultRow& r) {
  std::printf("m=%d L=%g km %-15s success=%.6g attempts=%.6g fidelity=%.6f +- %.2g\n", r.m,
              r.L_km, std::string(qn::to_string(r.strategy)).c_str(), r.success_probability,
              r.average_attempts, r.average_fidelity, r.fidelity_stderr);
  std::fflush(stdout);
}

int run_sweep_verb(const CommonFlags& f, bool timing, bool fresh, bool oracle_only) {
  qn::ResolvedConfig cfg = load(f);
  if (oracle_only) {
    if (cfg.sweep.engine != qn::Engine::oracle) {
      for (int m : cfg.sweep.m_values) {
        if (m > qn::kMaxOracleM) {
          throw qn::ConfigError({"m: oracle supports m <= 3, got " + std::to_string(m)});
        }
      }
      for (qn::Strategy s : cfg.sweep.strategies) {
        if (s != qn::Strategy::qudit) {
          throw qn::ConfigError({"strategy: oracle supports the qudit strategy only"});
        }
      }
      cfg.sweep.engine = qn::Engine::oracle;
      cfg.values["sweep.engine"] = "oracle";
    }
  }
  if (f.explain) std::cout << qn::explain(cfg);

  const std::filesystem::path dir(f.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw qn::ResultsIoError("cannot create " + dir.string() + ": " + ec.message());
  const std::string stem = oracle_only ? "oracle" : "results";
  const auto csv = dir / (stem + ".csv");
  if (fresh) std::filesystem::remove(csv, ec);

  qn::SweepOptions opts;
  opts.csv = csv;
  opts.threads = cfg.sweep.base.threads;
  opts.record_time = timing;
  opts.on_row = print_row;
  const qn::SweepResult res = qn::run_sweep(cfg.sweep, opts);
  qn::write_sidecar(dir / (stem + ".json"), cfg, res.rows, res.timings);
  std::printf("%zu rows computed, %zu already present, written to %s\n", res.computed,
              res.skipped, csv.string().c_str());
  return kOk;
}

int validate_verb(const CommonFlags& f) {
  const qn::ResolvedConfig cfg = load(f);
  if (f.explain) std::cout << qn::explain(cfg);
  std::printf("configuration ok: %zu sweep point(s)\n", cfg.sweep.point_count());
  return kOk;
}

int compare_verb(const CommonFlags& f) {
  const qn::ResolvedConfig cfg = load(f);
  if (f.explain) std::cout << qn::explain(cfg);
  bool all_agree = true;
  std::printf("%-3s %-7s %-8s %-22s %-14s %-8s\n", "m", "L_km", "quantity", "trajectory",
              "oracle", "z");
  for (int m : cfg.sweep.m_values) {
    for (double d : cfg.sweep.distances_km) {
      qn::ProtocolConfig pc = cfg.sweep.point(m, d, qn::Strategy::qudit);
      if (m > qn::kMaxOracleM) {
        std::printf("%-3d %-7g skipped: oracle supports m <= 3\n", m, d);
        continue;
      }
      const qn::Estimate e = qn::estimate_metrics(pc);
      const qn::OracleResult o = qn::exact_run(pc);
      auto report = [&](const std::string& what, double est, double se, double exact) {
        const double z = se > 0.0 ? (est - exact) / se : (est == exact ? 0.0 : INFINITY);
        const bool ok = std::abs(z) <= 3.0;
        all_agree = all_agree && ok;
        std::printf("%-3d %-7g %-8s %.8f +- %.1e %.8f %+6.2f %s\n", m, d, what.c_str(), est, se,
                    exact, z, ok ? "agree" : "DISAGREE");
      };
      report("herald", e.rates.success_probability, e.rates.success_stderr, o.herald_probability);
      for (int p = 0; p < m; ++p) {
        const auto i = static_cast<std::size_t>(p);
        report("F[" + std::to_string(p) + "]", e.pairs.per_pair_fidelity[i],
               e.pairs.per_pair_stderr[i], o.per_pair_fidelity[i]);
      }
    }
  }
  std::printf("%s\n", all_agree ? "all quantities within 3 standard errors"
                                : "some quantities differ by more than 3 standard errors");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-bin qudit entanglement distribution simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags, oracle_flags, validate_flags, compare_flags;
  bool timing = false, fresh = false, oracle_fresh = false;

  auto* run = app.add_subcommand("run", "Run a parameter sweep and write results.csv");
  add_common(run, run_flags, true);
  run->add_flag("--timing", timing, "Record wall times in the CSV (breaks byte determinism)");
  run->add_flag("--fresh", fresh, "Discard rows already present in the output");

  auto* oracle = app.add_subcommand("oracle", "Exact small-m results (m <= 3, qudit strategy)");
  add_common(oracle, oracle_flags, true);
  oracle->add_flag("--fresh", oracle_fresh, "Discard rows already present in the output");

  auto* validate = app.add_subcommand("validate", "Check a configuration file");
  add_common(validate, validate_flags, false);

  auto* compare = app.add_subcommand("compare", "Trajectory engine against the exact oracle");
  add_common(compare, compare_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return run_sweep_verb(run_flags, timing, fresh, false);
    if (*oracle) return run_sweep_verb(oracle_flags, false, oracle_fresh, true);
    if (*validate) return validate_verb(validate_flags);
    if (*compare) return compare_verb(compare_flags);
  } catch (const qn::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfig;
  } catch (const qn::EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << '\n';
    return kEstimation;
  } catch (const qn::ResultsIoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
