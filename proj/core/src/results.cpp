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

#include "qudit_net/results.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#ifndef QN_GIT_REVISION
#define QN_GIT_REVISION "unknown"
#endif

namespace qn {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* column) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ResultsIoError(std::string("malformed ") + column + " value '" + s + "'");
  }
  return v;
}

}  // namespace

RowKey key_of(const ResultRow& row) {
  return {row.m, row.L_km, static_cast<int>(row.strategy), row.seed};
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "m",           "L_km",         "strategy",       "success_probability",
      "average_attempts", "average_fidelity", "per_pair_fidelities", "fidelity_stderr",
      "n_trajectories", "seed",      "wall_time_s",    "engine"};
  return cols;
}

std::string csv_header() {
  std::string h;
  for (const auto& c : csv_columns()) h += (h.empty() ? "" : ",") + c;
  return h;
}

std::string format_row(const ResultRow& r) {
  std::string pairs;
  for (std::size_t i = 0; i < r.per_pair_fidelities.size(); ++i) {
    pairs += (i ? ";" : "") + num(r.per_pair_fidelities[i]);
  }
  std::ostringstream os;
  os << r.m << ',' << num(r.L_km) << ',' << to_string(r.strategy) << ','
     << num(r.success_probability) << ',' << num(r.average_attempts) << ','
     << num(r.average_fidelity) << ',' << pairs << ',' << num(r.fidelity_stderr) << ','
     << r.n_trajectories << ',' << r.seed << ',' << num(r.wall_time_s) << ','
     << to_string(r.engine);
  return os.str();
}

ResultRow parse_row(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != csv_columns().size()) {
    throw ResultsIoError("expected " + std::to_string(csv_columns().size()) + " columns, got " +
                         std::to_string(f.size()));
  }
  ResultRow r;
  r.m = parse_number<int>(f[0], "m");
  r.L_km = parse_number<double>(f[1], "L_km");
  const auto s = parse_strategy(f[2]);
  if (!s) throw ResultsIoError("unknown strategy '" + f[2] + "'");
  r.strategy = *s;
  r.success_probability = parse_number<double>(f[3], "success_probability");
  r.average_attempts = parse_number<double>(f[4], "average_attempts");
  r.average_fidelity = parse_number<double>(f[5], "average_fidelity");
  if (!f[6].empty()) {
    for (const auto& p : split(f[6], ';')) {
      r.per_pair_fidelities.push_back(parse_number<double>(p, "per_pair_fidelities"));
    }
  }
  r.fidelity_stderr = parse_number<double>(f[7], "fidelity_stderr");
  r.n_trajectories = parse_number<std::int64_t>(f[8], "n_trajectories");
  r.seed = parse_number<std::uint64_t>(f[9], "seed");
  r.wall_time_s = parse_number<double>(f[10], "wall_time_s");
  if (f[11] == "trajectory") {
    r.engine = Engine::trajectory;
  } else if (f[11] == "oracle") {
    r.engine = Engine::oracle;
  } else {
    throw ResultsIoError("unknown engine '" + f[11] + "'");
  }
  return r;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResultsIoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) {
    throw ResultsIoError(path.string() + ": missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      rows.push_back(parse_row(line));
    } catch (const ResultsIoError& e) {
      throw ResultsIoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

void write_csv_atomic(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResultsIoError("cannot write " + tmp.string());
    out << csv_header() << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
    out.flush();
    if (!out) throw ResultsIoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ResultsIoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string git_revision() { return QN_GIT_REVISION; }

void write_sidecar(const std::filesystem::path& path, const ResolvedConfig& cfg,
                   const std::vector<ResultRow>& rows, const SidecarTimings& timings) {
  nlohmann::ordered_json j;
  j["git_revision"] = git_revision();
  nlohmann::ordered_json config;
  for (const auto& [key, value] : cfg.values) {
    config[key] = {{"value", value}, {"provenance", std::string(to_string(cfg.provenance.at(key)))}};
  }
  j["config"] = config;
  j["columns"] = csv_columns();
  j["rows"] = rows.size();
  j["timings"] = {{"total_wall_s", timings.total_wall_s},
                  {"per_row_wall_s", timings.per_row_wall_s}};
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ResultsIoError("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
    if (!out) throw ResultsIoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ResultsIoError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace qn
