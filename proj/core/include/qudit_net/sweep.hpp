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

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "qudit_net/config.hpp"
#include "qudit_net/results.hpp"

namespace qn {

/// One table row from a finished estimate or oracle run.
ResultRow make_row(const ProtocolConfig& cfg, const Estimate& e, double wall_time_s);
ResultRow make_row(const ProtocolConfig& cfg, double herald_probability,
                   const std::vector<double>& per_pair_fidelity, double wall_time_s);

/// Runs one sweep point with the requested engine.
ResultRow run_point(const ProtocolConfig& cfg, Engine engine, bool record_time);

struct SweepOptions {
  /// Destination CSV; rows already present there are kept and not recomputed.
  std::optional<std::filesystem::path> csv;
  int threads = 1;
  /// Wall times are written as 0 unless set, so repeated runs are
  /// byte-identical.
  bool record_time = false;
  std::function<void(const ResultRow&)> on_row;
};

struct SweepResult {
  std::vector<ResultRow> rows;  // sorted by key
  std::size_t computed = 0;
  std::size_t skipped = 0;
  SidecarTimings timings;
};

/// Runs every (m, L, strategy) point. Points go to a pool of workers and are
/// committed in point order; each commit rewrites the CSV, so an interrupted
/// sweep resumes where it stopped. Throws EstimationError, ResultsIoError.
SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options);

}  // namespace qn
