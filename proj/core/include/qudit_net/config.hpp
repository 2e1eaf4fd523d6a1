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

// Run configuration: a flat "key = value" text format with dotted sections
// and '#' comments. Every field has a default and a provenance tag.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qudit_net/protocol.hpp"

namespace qn {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

enum class Engine { trajectory, oracle };
std::string_view to_string(Engine e);

struct SweepSpec {
  ProtocolConfig base;
  std::vector<double> distances_km;
  std::vector<int> m_values;
  std::vector<Strategy> strategies;
  Engine engine = Engine::trajectory;

  std::size_t point_count() const {
    return distances_km.size() * m_values.size() * strategies.size();
  }
  /// The configuration of one sweep point.
  ProtocolConfig point(int m, double distance_km, Strategy s) const;
};

enum class Provenance { published, assumed, user };
std::string_view to_string(Provenance p);

struct ResolvedConfig {
  SweepSpec sweep;
  /// Canonical text of every field, keyed by its dotted name.
  std::map<std::string, std::string> values;
  std::map<std::string, Provenance> provenance;
};

/// Names of all accepted keys, in documentation order.
std::vector<std::string> config_keys();

/// Parses and range-checks a configuration. An empty text gives the full
/// default configuration. Throws ConfigError listing every problem found,
/// each prefixed with the field path (or line number for syntax errors).
ResolvedConfig validate_config(std::string_view text);

/// Applies "key=value" overrides on top of an existing text.
ResolvedConfig validate_config(std::string_view text,
                               const std::vector<std::pair<std::string, std::string>>& overrides);

/// Human-readable listing of every field, its value and its provenance,
/// followed by quantities derived from them.
std::string explain(const ResolvedConfig& cfg);

}  // namespace qn
