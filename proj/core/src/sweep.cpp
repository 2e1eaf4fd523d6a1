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

#include "qudit_net/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "qudit_net/oracle.hpp"

namespace qn {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) { return key_of(a) < key_of(b); });
}

}  // namespace

ResultRow make_row(const ProtocolConfig& cfg, const Estimate& e, double wall_time_s) {
  ResultRow r;
  r.m = cfg.m;
  r.L_km = cfg.distance_km;
  r.strategy = cfg.strategy;
  r.success_probability = e.rates.success_probability;
  r.average_attempts = e.rates.average_attempts;
  r.average_fidelity = e.pairs.average_fidelity;
  r.per_pair_fidelities = e.pairs.per_pair_fidelity;
  r.fidelity_stderr = e.pairs.standard_error;
  r.n_trajectories = e.rates.n_trajectories;
  r.seed = cfg.seed;
  r.wall_time_s = wall_time_s;
  r.engine = Engine::trajectory;
  return r;
}

ResultRow make_row(const ProtocolConfig& cfg, double herald_probability,
                   const std::vector<double>& per_pair_fidelity, double wall_time_s) {
  ResultRow r;
  r.m = cfg.m;
  r.L_km = cfg.distance_km;
  r.strategy = cfg.strategy;
  r.success_probability = herald_probability;
  r.average_attempts = 1.0 / herald_probability;
  double sum = 0.0;
  for (double f : per_pair_fidelity) sum += f;
  r.average_fidelity = sum / static_cast<double>(per_pair_fidelity.size());
  r.per_pair_fidelities = per_pair_fidelity;
  r.fidelity_stderr = 0.0;
  r.n_trajectories = 0;
  r.seed = cfg.seed;
  r.wall_time_s = wall_time_s;
  r.engine = Engine::oracle;
  return r;
}

ResultRow run_point(const ProtocolConfig& cfg, Engine engine, bool record_time) {
  const auto start = std::chrono::steady_clock::now();
  if (engine == Engine::oracle) {
    const OracleResult o = exact_run(cfg);
    const double t = seconds_since(start);
    return make_row(cfg, o.herald_probability, o.per_pair_fidelity, record_time ? t : 0.0);
  }
  const Estimate e = estimate_metrics(cfg);
  const double t = seconds_since(start);
  return make_row(cfg, e, record_time ? t : 0.0);
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult result;

  std::map<RowKey, ResultRow> done;
  if (options.csv && std::filesystem::exists(*options.csv)) {
    for (ResultRow& r : read_csv(*options.csv)) {
      const RowKey k = key_of(r);
      done.emplace(k, std::move(r));
    }
  }

  std::vector<ProtocolConfig> todo;
  for (int m : spec.m_values) {
    for (double d : spec.distances_km) {
      for (Strategy s : spec.strategies) {
        ProtocolConfig cfg = spec.point(m, d, s);
        ResultRow probe;
        probe.m = m;
        probe.L_km = d;
        probe.strategy = s;
        probe.seed = cfg.seed;
        if (done.count(key_of(probe))) {
          ++result.skipped;
          continue;
        }
        todo.push_back(std::move(cfg));
      }
    }
  }

  // A single point gets every thread; several points run one per worker.
  const int pool = std::max(1, std::min<int>(options.threads, static_cast<int>(todo.size())));
  for (auto& cfg : todo) cfg.threads = pool == 1 ? options.threads : 1;

  std::vector<std::optional<ResultRow>> slots(todo.size());
  std::size_t committed = 0;
  std::mutex mu;
  std::exception_ptr error;
  std::atomic<std::size_t> next{0};

  auto flush = [&] {
    // Called with `mu` held: commit the finished prefix in point order.
    bool wrote = false;
    while (committed < slots.size() && slots[committed]) {
      const ResultRow& row = *slots[committed];
      done.emplace(key_of(row), row);
      result.timings.per_row_wall_s.push_back(row.wall_time_s);
      if (options.on_row) options.on_row(row);
      ++committed;
      wrote = true;
    }
    if (wrote && options.csv) {
      std::vector<ResultRow> rows;
      for (const auto& [k, r] : done) rows.push_back(r);
      write_csv_atomic(*options.csv, rows);
    }
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      try {
        ResultRow row = run_point(todo[i], spec.engine, options.record_time);
        std::lock_guard lock(mu);
        slots[i] = std::move(row);
        flush();
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = todo.size();
      }
    }
  };

  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  result.computed = committed;
  for (auto& [k, r] : done) result.rows.push_back(r);
  sort_rows(result.rows);
  if (options.csv) write_csv_atomic(*options.csv, result.rows);
  result.timings.total_wall_s = seconds_since(start);
  return result;
}

}  // namespace qn
