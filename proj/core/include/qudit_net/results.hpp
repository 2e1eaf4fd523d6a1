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

// Result table persistence: CSV rows plus a JSON sidecar with the resolved
// configuration and build revision.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qudit_net/config.hpp"

namespace qn {

class ResultsIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResultRow {
  int m = 0;
  double L_km = 0.0;
  Strategy strategy = Strategy::qudit;
  double success_probability = 0.0;
  double average_attempts = 0.0;
  double average_fidelity = 0.0;
  std::vector<double> per_pair_fidelities;
  double fidelity_stderr = 0.0;
  std::int64_t n_trajectories = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  Engine engine = Engine::trajectory;

  bool operator==(const ResultRow&) const = default;
};

/// (m, L, strategy, seed): a row's identity for sorting and resumption.
using RowKey = std::tuple<int, double, int, std::uint64_t>;
RowKey key_of(const ResultRow& row);

/// Column names, in order.
const std::vector<std::string>& csv_columns();
std::string csv_header();
/// Numbers use "%.17g", so parsing a written row gives back the same doubles.
std::string format_row(const ResultRow& row);
ResultRow parse_row(const std::string& line);

/// Throws ResultsIoError on I/O failure or a malformed file.
std::vector<ResultRow> read_csv(const std::filesystem::path& path);
/// Writes to path + ".tmp" and renames, so readers never see a partial file.
void write_csv_atomic(const std::filesystem::path& path, const std::vector<ResultRow>& rows);

/// Revision of the source tree the library was built from.
std::string git_revision();

struct SidecarTimings {
  double total_wall_s = 0.0;
  std::vector<double> per_row_wall_s;
};

void write_sidecar(const std::filesystem::path& path, const ResolvedConfig& cfg,
                   const std::vector<ResultRow>& rows, const SidecarTimings& timings);

}  // namespace qn
