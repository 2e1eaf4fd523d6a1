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

#include "qudit_net/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace qn {

namespace {

struct FieldSpec {
  const char* key;
  const char* default_text;
  Provenance provenance;
  const char* note;
};

// Order here is the order of `--explain` output.
constexpr FieldSpec kFields[] = {
    {"m", "2", Provenance::assumed, "run control; pairs per qudit"},
    {"distance_km", "20", Provenance::assumed, "run control"},
    {"strategy", "qudit", Provenance::assumed, "run control"},
    {"trajectories", "100000", Provenance::assumed, "run control; samples per point"},
    {"seed", "1", Provenance::assumed, "run control"},
    {"threads", "1", Provenance::assumed, "run control; results do not depend on it"},
    {"precompensate", "true", Provenance::published, "source amplitudes cancel bin-dependent loss"},
    {"fiber.attenuation_km", "20", Provenance::published, "telecom fiber"},
    {"fiber.speed_km_s", "200000", Provenance::assumed, "light speed in fiber"},
    {"source.sigma_a", "0.1", Provenance::published, "relative amplitude noise per bin"},
    {"source.sigma_p", "0.1", Provenance::published, "phase noise per bin (rad)"},
    {"gate.cooperativity0", "0", Provenance::published, "|0> uncoupled"},
    {"gate.cooperativity1", "100", Provenance::published, "|1> cooperativity"},
    {"gate.kappa_a_over_kappa", "0.95", Provenance::published, "5% in/out coupling loss"},
    {"gate.kappa_rad_s", "1e11", Provenance::assumed, "only ratios to it enter"},
    {"gate.gamma_rad_s", "1e8", Provenance::assumed, "only ratios to it enter"},
    {"gate.omega_rad_s", "0", Provenance::assumed, "resonant photon"},
    {"gate.delta0_rad_s", "0", Provenance::assumed, "resonant |0> transition"},
    {"gate.delta1_rad_s", "0", Provenance::assumed, "resonant |1> transition"},
    {"gate.ideal", "false", Provenance::assumed, "true forces r0 = -1, r1 = +1"},
    {"switch.eta", "0.9", Provenance::published, "10% loss per switch pass"},
    {"switch.error", "0.01", Provenance::published, "1% wrong-port leakage"},
    {"detection.eta_lag", "0.01", Provenance::published, "1% loss per delay loop"},
    {"detection.sigma_x_per_m", "0.1", Provenance::published, "interferometer phase noise is this times m"},
    {"detection.efficiency", "1", Provenance::assumed, "no separate detector loss"},
    {"channel.t1_s", "0.01", Provenance::published, "amplitude damping time"},
    {"channel.tp_s", "0.005", Provenance::published, "pure dephasing time"},
    {"channel.a_beta", "0.5", Provenance::assumed, "steady-state |0> population, not given"},
    {"sweep.distances_km", "", Provenance::assumed, "empty: use distance_km"},
    {"sweep.m_values", "", Provenance::assumed, "empty: use m"},
    {"sweep.strategies", "", Provenance::assumed, "empty: use strategy"},
    {"sweep.engine", "trajectory", Provenance::assumed, "trajectory or oracle"},
};

const FieldSpec* find_field(std::string_view key) {
  for (const auto& f : kFields) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Typed reads that record a field-path message instead of throwing.
class Reader {
 public:
  Reader(const std::map<std::string, std::string>& values, std::vector<std::string>& issues)
      : values_(values), issues_(issues) {}

  const std::string& text(const char* key) const { return values_.at(key); }

  double real(const char* key) { return parse_real(key, text(key)); }

  double real_in(const char* key, double lo, double hi) {
    const double v = real(key);
    if (std::isnan(v)) return v;
    if (!(v >= lo && v <= hi)) fail(key, "must lie in [" + fmt(lo) + ", " + fmt(hi) + "], got " + text(key));
    return v;
  }
  double positive(const char* key) {
    const double v = real(key);
    if (std::isnan(v)) return v;
    if (!(v > 0.0)) fail(key, "must be positive, got " + text(key));
    return v;
  }
  double non_negative(const char* key) {
    const double v = real(key);
    if (std::isnan(v)) return v;
    if (!(v >= 0.0)) fail(key, "must be non-negative, got " + text(key));
    return v;
  }
  double finite(const char* key) {
    const double v = real(key);
    if (std::isnan(v)) return v;
    if (!std::isfinite(v)) fail(key, "must be finite, got " + text(key));
    return v;
  }

  std::int64_t integer(const char* key, std::string_view s) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) fail(key, "expected an integer, got '" + std::string(s) + "'");
    return v;
  }
  std::int64_t integer(const char* key) { return integer(key, text(key)); }

  std::uint64_t unsigned64(const char* key) {
    const std::string& s = text(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      fail(key, "expected an unsigned 64-bit integer, got '" + s + "'");
    }
    return v;
  }

  bool boolean(const char* key) {
    const std::string& s = text(key);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(key, "expected true or false, got '" + s + "'");
    return false;
  }

  double parse_real(const char* key, std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) {
      fail(key, "expected a number, got '" + std::string(s) + "'");
      return std::nan("");
    }
    return v;
  }

  void fail(const char* key, const std::string& what) { issues_.push_back(std::string(key) + ": " + what); }

  static std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

 private:
  const std::map<std::string, std::string>& values_;
  std::vector<std::string>& issues_;
};

std::string limit_message(int got) {
  return "engine supports 1 <= m <= " + std::to_string(kMaxEngineM) + ", got " + std::to_string(got);
}

std::string join_list(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& i : issues) msg += "\n  " + i;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::string_view to_string(Engine e) { return e == Engine::oracle ? "oracle" : "trajectory"; }

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::published: return "published default";
    case Provenance::assumed: return "assumed";
    case Provenance::user: return "user";
  }
  return "unknown";
}

ProtocolConfig SweepSpec::point(int m, double distance_km, Strategy s) const {
  ProtocolConfig c = base;
  c.m = m;
  c.distance_km = distance_km;
  c.strategy = s;
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : kFields) keys.emplace_back(f.key);
  return keys;
}

ResolvedConfig validate_config(std::string_view text) { return validate_config(text, {}); }

ResolvedConfig validate_config(std::string_view text,
                               const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::string> issues;
  ResolvedConfig out;
  for (const auto& f : kFields) {
    out.values[f.key] = f.default_text;
    out.provenance[f.key] = f.provenance;
  }

  std::set<std::string> seen;
  auto assign = [&](std::string_view key, std::string_view value, const std::string& where) {
    if (find_field(key) == nullptr) {
      issues.push_back(where + "unknown key '" + std::string(key) + "'");
      return;
    }
    out.values[std::string(key)] = std::string(value);
    out.provenance[std::string(key)] = Provenance::user;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!seen.insert(key).second) {
      issues.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    assign(key, trim(line.substr(eq + 1)), where);
  }
  for (const auto& [key, value] : overrides) assign(key, trim(value), "override: ");
  if (!issues.empty()) throw ConfigError(std::move(issues));

  Reader r(out.values, issues);
  ProtocolConfig c;
  const std::int64_t m = r.integer("m");
  if (m < 1 || m > kMaxEngineM) r.fail("m", limit_message(static_cast<int>(m)));
  c.m = static_cast<int>(m);
  c.distance_km = r.non_negative("distance_km");
  if (std::isinf(c.distance_km)) r.fail("distance_km", "must be finite");
  if (auto s = parse_strategy(r.text("strategy"))) {
    c.strategy = *s;
  } else {
    r.fail("strategy", "expected qudit, qubit_all_keep or qubit_one_shot, got '" + r.text("strategy") + "'");
  }
  c.n_trajectories = r.integer("trajectories");
  if (c.n_trajectories < 1) r.fail("trajectories", "must be at least 1");
  c.seed = r.unsigned64("seed");
  const std::int64_t threads = r.integer("threads");
  if (threads < 1 || threads > 1024) r.fail("threads", "must lie in [1, 1024]");
  c.threads = static_cast<int>(threads);
  c.precompensate = r.boolean("precompensate");

  c.attenuation_km = r.positive("fiber.attenuation_km");
  c.c_fiber_km_s = r.positive("fiber.speed_km_s");
  c.source.sigma_a = r.non_negative("source.sigma_a");
  c.source.sigma_p = r.non_negative("source.sigma_p");

  const double c0 = r.non_negative("gate.cooperativity0");
  const double c1 = r.non_negative("gate.cooperativity1");
  const double ratio = r.real_in("gate.kappa_a_over_kappa", 0.0, 1.0);
  const double kappa = r.positive("gate.kappa_rad_s");
  const double gamma = r.positive("gate.gamma_rad_s");
  c.gate.omega = r.finite("gate.omega_rad_s");
  c.gate.delta0 = r.finite("gate.delta0_rad_s");
  c.gate.delta1 = r.finite("gate.delta1_rad_s");
  const bool ideal = r.boolean("gate.ideal");

  c.sw.eta_sw = r.real_in("switch.eta", 0.0, 1.0);
  c.sw.e_sw = r.real_in("switch.error", 0.0, 1.0);
  c.detection.eta_lag = r.real_in("detection.eta_lag", 0.0, 1.0);
  c.detection.sigma_x_per_level = r.non_negative("detection.sigma_x_per_m");
  c.detection.detector_efficiency = r.real_in("detection.efficiency", 0.0, 1.0);
  c.channel.t1 = r.positive("channel.t1_s");
  c.channel.tp = r.positive("channel.tp_s");
  c.channel.a_beta = r.real_in("channel.a_beta", 0.0, 1.0);

  SweepSpec& sweep = out.sweep;
  for (auto item : split_list(r.text("sweep.distances_km"))) {
    const double d = r.parse_real("sweep.distances_km", item);
    if (!std::isnan(d) && !(d >= 0.0 && std::isfinite(d))) r.fail("sweep.distances_km", "distances must be finite and >= 0");
    sweep.distances_km.push_back(d);
  }
  for (auto item : split_list(r.text("sweep.m_values"))) {
    const auto v = r.integer("sweep.m_values", item);
    if (v < 1 || v > kMaxEngineM) r.fail("sweep.m_values", limit_message(static_cast<int>(v)));
    sweep.m_values.push_back(static_cast<int>(v));
  }
  for (auto item : split_list(r.text("sweep.strategies"))) {
    if (auto s = parse_strategy(item)) {
      sweep.strategies.push_back(*s);
    } else {
      r.fail("sweep.strategies", "unknown strategy '" + std::string(item) + "'");
    }
  }
  const std::string& engine = r.text("sweep.engine");
  if (engine == "trajectory") {
    sweep.engine = Engine::trajectory;
  } else if (engine == "oracle") {
    sweep.engine = Engine::oracle;
  } else {
    r.fail("sweep.engine", "expected trajectory or oracle, got '" + engine + "'");
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));

  if (sweep.distances_km.empty()) sweep.distances_km.push_back(c.distance_km);
  if (sweep.m_values.empty()) sweep.m_values.push_back(c.m);
  if (sweep.strategies.empty()) sweep.strategies.push_back(c.strategy);

  auto has_duplicates = [](auto v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  if (has_duplicates(sweep.distances_km)) r.fail("sweep.distances_km", "sweep points must be distinct");
  if (has_duplicates(sweep.m_values)) r.fail("sweep.m_values", "sweep points must be distinct");
  if (has_duplicates(sweep.strategies)) r.fail("sweep.strategies", "sweep points must be distinct");
  if (sweep.engine == Engine::oracle) {
    for (int v : sweep.m_values) {
      if (v > 3) r.fail("sweep.engine", "oracle supports m <= 3, got " + std::to_string(v));
    }
    for (Strategy s : sweep.strategies) {
      if (s != Strategy::qudit) r.fail("sweep.engine", "oracle supports the qudit strategy only");
    }
  }

  try {
    c.gate = [&] {
      GateParams g = GateParams::from_cooperativities(c0, c1, ratio, kappa, gamma);
      g.omega = c.gate.omega;
      g.delta0 = c.gate.delta0;
      g.delta1 = c.gate.delta1;
      return g;
    }();
    if (ideal) c.reflection_override = ReflectionPair{-1.0, 1.0};
    c.validate();
  } catch (const std::invalid_argument& e) {
    issues.emplace_back(e.what());
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  sweep.base = c;
  auto list_text = [](const auto& v, auto fmt) {
    std::vector<std::string> parts;
    for (const auto& x : v) parts.push_back(fmt(x));
    return join_list(parts);
  };
  out.values["sweep.distances_km"] = list_text(sweep.distances_km, format_double);
  out.values["sweep.m_values"] = list_text(sweep.m_values, [](int v) { return std::to_string(v); });
  out.values["sweep.strategies"] =
      list_text(sweep.strategies, [](Strategy s) { return std::string(to_string(s)); });
  return out;
}

std::string explain(const ResolvedConfig& cfg) {
  std::ostringstream os;
  os << "# fields\n";
  for (const auto& f : kFields) {
    const Provenance p = cfg.provenance.at(f.key);
    std::string line = std::string(f.key) + " = " + cfg.values.at(f.key);
    os << std::left << std::setw(44) << line << " [" << to_string(p);
    if (p != Provenance::user) os << ": " << f.note;
    os << "]\n";
  }

  const ProtocolConfig& c = cfg.sweep.base;
  const ReflectionPair r = c.reflection();
  auto derived = [&](const std::string& key, const std::string& value, const char* how) {
    os << std::left << std::setw(44) << (key + " = " + value) << " [derived: " << how << "]\n";
  };
  auto cplx = [](Complex z) {
    std::ostringstream s;
    s << std::setprecision(10) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return s.str();
  };
  os << "# derived\n";
  derived("gate.r0", cplx(r.r0), "cavity reflection with the spin in |0>");
  derived("gate.r1", cplx(r.r1), "cavity reflection with the spin in |1>");
  derived("gate.cavity_pass", format_double(hit_transmission(r)), "(|r0|^2 + |r1|^2) / 2");
  derived("stage.eta0", format_double(c.sw.eta_sw * 0.5 * (1.0 + hit_transmission(r))),
          "switch pass times cavity pass, averaged over bins");
  for (int m : cfg.sweep.m_values) {
    derived("detection.sigma_x[m=" + std::to_string(m) + "]", format_double(c.detection.sigma_x(m)),
            "sigma_x_per_m * m");
  }
  for (double d : cfg.sweep.distances_km) {
    const std::string tag = "[L=" + format_double(d) + "]";
    derived("fiber.transmission" + tag, format_double(fiber_transmission(d, c.attenuation_km)),
            "exp(-L / L_att)");
    derived("channel.wait_alice_s" + tag, format_double(2.0 * d / c.c_fiber_km_s), "2 L / c");
    derived("channel.wait_bob_s" + tag, format_double(d / c.c_fiber_km_s), "L / c");
  }
  return os.str();
}

}  // namespace qn
