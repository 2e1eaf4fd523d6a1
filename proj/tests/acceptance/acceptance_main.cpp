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

// Acceptance gate. Each criterion prints one line:
//   [PASS] name: detail
//   [FAIL] name: detail
// and the exit status is nonzero if any selected criterion failed.
//
//   qn_acceptance                      run everything
//   qn_acceptance --only all_keep_decay       run one criterion
//   qn_acceptance --cache DIR          where campaign CSVs live
//
// The distance-sweep criteria read DIR/campaign_a/results.csv, which the "campaign"
// criterion writes. "determinism" writes DIR/campaign_b and compares bytes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "qudit_net/cavity.hpp"
#include "qudit_net/channels.hpp"
#include "qudit_net/config.hpp"
#include "qudit_net/optics.hpp"
#include "qudit_net/oracle.hpp"
#include "qudit_net/protocol.hpp"
#include "qudit_net/qstate.hpp"
#include "qudit_net/results.hpp"
#include "qudit_net/source.hpp"
#include "qudit_net/sweep.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace qn;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Verdict ideal_pipeline() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int m = 1; m <= 5; ++m) {
    ProtocolConfig cfg = ProtocolConfig::ideal(m);
    cfg.n_trajectories = 300;
    const Estimate e = estimate_metrics(cfg);
    worst = std::max(worst, std::abs(e.rates.success_probability - 1.0));
    for (double f : e.pairs.per_pair_fidelity) worst = std::max(worst, std::abs(f - 1.0));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 10.0, fmt("max |x - 1| = %.2e over m = 1..5, %.2f s", worst, t)};
}

Verdict reflection_gold() {
  const auto r0 = reflection_coefficients(GateParams::from_cooperativities(0.0, 100.0, 1.0)).r0;
  const auto r1 = reflection_coefficients(GateParams{}).r1;
  const double e0 = std::abs(r0 - Complex{-1.0, 0.0});
  const double e1 = std::abs(r1 - Complex{0.9952618, 0.0});
  return {e0 <= 1e-12 && e1 <= 1e-6,
          fmt("r0 = %.12f%+.1ei, r1 = %.9f%+.1ei", r0.real(), r0.imag(), r1.real(), r1.imag())};
}

Verdict source_physics() {
  const auto t0 = Clock::now();
  // Bad-cavity weak-drive regime, dimensionless units, C = 1.
  SourceParams p;
  p.drive = {0.1, 0.0};
  p.coupling = {10.0, 0.0};
  p.kappa = 100.0;
  p.gamma_g = p.gamma_f = 0.5;
  p.detuning = 0.0;
  p.pulse_duration = 1500.0;

  std::vector<double> grid;
  for (int i = 0; i < 400; ++i) grid.push_back((p.pulse_duration + 5.0) * i / 399.0);
  double peak = 0.0;
  for (double t : grid) peak = std::max(peak, std::abs(closed_form_c2(p, t)));
  double worst = 0.0;
  for (const auto& s : solve_lambda_dynamics(p, grid)) {
    if (s.t < 10.0) continue;  // adiabatic following needs a few 1/(gamma (1 + 4C))
    worst = std::max(worst, std::abs(s.c2 - closed_form_c2(p, s.t)) / peak);
  }

  const double limit = 1.0 / (1.0 + 4.0 * p.cooperativity());
  const double closed = spontaneous_emission_prob(p).total;
  const std::vector<double> ends{0.0, p.pulse_duration + 20.0};
  const double ode = solve_lambda_dynamics(p, ends).back().spontaneous_prob;
  const double rel = std::max(std::abs(closed - limit), std::abs(ode - limit)) / limit;
  const double t = seconds_since(t0);
  return {worst < 0.01 && rel < 0.01 && t < 30.0,
          fmt("c2 rel err %.2e, P_gamma rel err %.2e (closed %.5f, ode %.5f, limit %.5f), %.2f s",
              worst, rel, closed, ode, limit, t)};
}

// Ideal pre-measurement state for m pairs: a single pure branch.
PureState ideal_premeasurement(int m) {
  const ProtocolConfig cfg = ProtocolConfig::ideal(m);
  const AttemptPipeline pipe(cfg);
  const std::size_t regs = pipe.register_layout.total_dim();
  CVector amps(static_cast<Eigen::Index>(pipe.bins * regs));
  for (std::size_t l = 0; l < pipe.bins; ++l)
    amps.segment(static_cast<Eigen::Index>(l * regs), static_cast<Eigen::Index>(regs))
        .setConstant(pipe.base.amps[static_cast<Eigen::Index>(l)] / std::sqrt(double(regs)));
  const PureState start(amps, pipe.layout);
  const auto a = register_interaction(start, Side::alice, m, pipe.r, cfg.sw);
  const auto b = register_interaction(a.front(), Side::bob, m, pipe.r, cfg.sw);
  return b.front();
}

Verdict qft() {
  double unitary = 0.0;
  for (int m = 1; m <= 6; ++m) {
    const CMatrix f = qft_matrix(m);
    unitary = std::max(unitary, (f * f.adjoint() - CMatrix::Identity(f.rows(), f.cols())).cwiseAbs().maxCoeff());
  }
  double uniform_k0 = 1.0;
  for (int m = 1; m <= 6; ++m) {
    const auto n = std::size_t{1} << m;
    const PureState u(QuditAmplitudes::uniform(m).amps, HilbertLayout({n}, {std::string(kPhotonLabel)}));
    uniform_k0 = std::min(uniform_k0, qft_outcome_probabilities(u)[0]);
  }
  double fidelity = 1.0;
  int checked = 0;
  for (int m = 1; m <= 5; ++m) {
    const AttemptPipeline pipe(ProtocolConfig::ideal(m));
    const PureState pre = ideal_premeasurement(m);
    for (int k = 0; k < (1 << m); ++k) {
      PureState reg = project_photon_onto(pre, k);
      reg.amplitudes().normalize();
      for (int p = 0; p < m; ++p)
        apply_local(reg, pipe.corrections[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)],
                    pipe.register_layout.index_of(bob_label(p)));
      for (int p = 0; p < m; ++p) {
        const Eigen::Matrix4cd rho = pair_density(reg, m, p);
        fidelity = std::min(fidelity, fidelity_to_bell(Eigen::Matrix4cd(rho / rho.trace().real())));
      }
      ++checked;
    }
  }
  return {unitary <= 1e-10 && uniform_k0 >= 1.0 - 1e-10 && std::abs(fidelity - 1.0) <= 1e-10,
          fmt("max |FF^+ - I| = %.1e, min P(k=0 | uniform) = %.12f, min corrected F = %.12f over %d (m, k)",
              unitary, uniform_k0, fidelity, checked)};
}

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (int m = 1; m <= 3; ++m) {
    for (double L : {20.0, 60.0}) {
      ProtocolConfig cfg;
      cfg.m = m;
      cfg.distance_km = L;
      cfg.n_trajectories = 100000;
      const OracleResult exact = exact_run(cfg);
      const Estimate mc = estimate_metrics(cfg);
      const double p = exact.herald_probability;
      const double zp = std::abs(mc.rates.success_probability - p) /
                        std::sqrt(p * (1.0 - p) / double(mc.rates.n_trajectories));
      const double zf = std::abs(mc.pairs.average_fidelity - exact.average_fidelity) / mc.pairs.standard_error;
      ok = ok && zp <= 3.0 && zf <= 3.0;
      detail += fmt(" m%d/L%.0f z_p=%.2f z_F=%.2f;", m, L, zp, zf);
    }
  }
  const double t = seconds_since(t0);
  return {ok && t < 600.0, fmt("%.1f s;", t) + detail};
}

Verdict channel_math() {
  Rng rng(77);
  double completeness = 0.0;
  const ChannelParams defaults;
  for (double t : {0.0, 1e-6, 1e-4, 3e-3, 2e-2, 1.0}) {
    std::vector<std::vector<CMatrix>> sets;
    const auto dk = dephasing_kraus(t, defaults.tp);
    const auto gk = gad_kraus(t, defaults.t1, 0.3);
    sets.emplace_back(dk.begin(), dk.end());
    sets.emplace_back(gk.begin(), gk.end());
    sets.push_back(memory_kraus(t, defaults));
    for (const auto& ks : sets) {
      CMatrix sum = CMatrix::Zero(2, 2);
      for (const auto& k : ks) sum += k.adjoint() * k;
      completeness = std::max(completeness, (sum - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff());
    }
  }

  auto apply = [](const auto& kraus, const CMatrix& rho) {
    CMatrix out = CMatrix::Zero(2, 2);
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
  };
  double steady = 0.0;
  for (double a_beta : {0.5, 0.2, 0.85}) {
    CMatrix target = CMatrix::Zero(2, 2);
    target(0, 0) = a_beta;
    target(1, 1) = 1.0 - a_beta;
    for (int i = 0; i < 20; ++i) {
      const CMatrix rho = testing::random_density(2, rng);
      steady = std::max(steady, (apply(gad_kraus(100.0 * defaults.t1, defaults.t1, a_beta), rho) - target)
                                    .cwiseAbs()
                                    .maxCoeff());
    }
  }

  double semigroup = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CMatrix rho = testing::random_density(2, rng);
    const double t1 = 1e-2 * uniform01(rng), t2 = 1e-2 * uniform01(rng);
    const CMatrix two = apply(memory_kraus(t2, defaults), apply(memory_kraus(t1, defaults), rho));
    const CMatrix one = apply(memory_kraus(t1 + t2, defaults), rho);
    semigroup = std::max(semigroup, (two - one).cwiseAbs().maxCoeff());
    const CMatrix g2 = apply(gad_kraus(t2, defaults.t1, 0.3), apply(gad_kraus(t1, defaults.t1, 0.3), rho));
    semigroup = std::max(semigroup, (g2 - apply(gad_kraus(t1 + t2, defaults.t1, 0.3), rho)).cwiseAbs().maxCoeff());
  }
  return {completeness <= 1e-12 && steady <= 1e-8 && semigroup <= 1e-10,
          fmt("completeness %.1e, steady state %.1e, semigroup %.1e", completeness, steady, semigroup)};
}

Verdict scaling_law() {
  // Every loss except the fiber is switched off.
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  ProtocolConfig cfg = ProtocolConfig::ideal(2);
  cfg.n_trajectories = 100000;
  for (int i = 1; i <= 10; ++i) {
    cfg.distance_km = 10.0 * i;
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    const Estimate e = estimate_metrics(cfg);
    const double p = e.rates.success_probability;
    // Var(ln p_hat) ~ (1 - p) / (n p).
    const double w = double(e.rates.n_trajectories) * p / (1.0 - p);
    const double x = cfg.distance_km, y = std::log(p);
    sw += w;
    swx += w * x;
    swy += w * y;
    swxx += w * x * x;
    swxy += w * x * y;
  }
  const double slope = (sw * swxy - swx * swy) / (sw * swxx - swx * swx);
  const double expect = -1.0 / cfg.attenuation_km;
  const double rel = std::abs(slope / expect - 1.0);
  return {rel < 0.02, fmt("fitted slope %.6f /km vs %.6f /km, rel err %.3f%%", slope, expect, 100.0 * rel)};
}

// ---------------------------------------------------------------------------
// Campaign at published defaults.

constexpr const char* kCampaignConfig =
    "sweep.m_values = 2, 4, 5\n"
    "sweep.distances_km = 10, 20, 30, 40, 50, 60, 70, 80, 90, 100\n"
    "sweep.strategies = qudit, qubit_all_keep, qubit_one_shot\n"
    "trajectories = 100000\n";

SweepSpec campaign_spec() { return validate_config(kCampaignConfig).sweep; }

fs::path run_campaign(const fs::path& dir, double* seconds) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  SweepOptions o;
  o.csv = dir / "results.csv";
  const auto t0 = Clock::now();
  run_sweep(campaign_spec(), o);
  if (seconds) *seconds = seconds_since(t0);
  return *o.csv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

using Key = std::tuple<int, double, Strategy>;

struct Table {
  std::map<Key, ResultRow> rows;
  std::vector<int> ms;
  std::vector<double> Ls;
  const ResultRow& at(int m, double L, Strategy s) const { return rows.at({m, L, s}); }
};

Table load_campaign(const fs::path& cache) {
  const fs::path csv = cache / "campaign_a" / "results.csv";
  if (!fs::exists(csv)) throw std::runtime_error(csv.string() + " missing; run the campaign criterion first");
  Table t;
  const SweepSpec spec = campaign_spec();
  t.ms = spec.m_values;
  t.Ls = spec.distances_km;
  for (const auto& r : read_csv(csv)) t.rows[{r.m, r.L_km, r.strategy}] = r;
  if (t.rows.size() != spec.point_count()) throw std::runtime_error("campaign CSV is incomplete");
  return t;
}

Verdict campaign(const fs::path& cache) {
  double s = 0.0;
  run_campaign(cache / "campaign_a", &s);
  return {s < 3600.0, fmt("%zu points in %.0f s", campaign_spec().point_count(), s)};
}

Verdict qudit_fidelity_flat(const Table& t) {
  bool ok = true;
  std::string detail;
  for (int m : t.ms) {
    double lo = 1.0, hi = 0.0;
    for (double L : t.Ls) {
      const double f = t.at(m, L, Strategy::qudit).average_fidelity;
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    ok = ok && hi - lo < 0.01;
    detail += fmt(" m=%d spread %.4f (%.4f..%.4f);", m, hi - lo, lo, hi);
  }
  return {ok, "qudit fidelity spread over L, limit 0.01:" + detail};
}

Verdict all_keep_decay(const Table& t) {
  bool decreasing = true;
  for (int m : t.ms)
    for (std::size_t i = 1; i < t.Ls.size(); ++i)
      decreasing = decreasing && t.at(m, t.Ls[i], Strategy::qubit_all_keep).average_fidelity <
                                     t.at(m, t.Ls[i - 1], Strategy::qubit_all_keep).average_fidelity;
  double below_at = -1.0;
  for (double L : t.Ls) {
    if (L > 30.0) break;
    if (t.at(5, L, Strategy::qubit_all_keep).average_fidelity < t.at(5, L, Strategy::qudit).average_fidelity) {
      below_at = L;
      break;
    }
  }
  const double L0 = t.Ls.front();
  return {decreasing && below_at > 0.0,
          fmt("all-keep strictly decreasing: %s; m=5 all-keep below qudit first at L = %.0f km "
              "(at %.0f km: all-keep %.4f, qudit %.4f)",
              decreasing ? "yes" : "no", below_at, L0, t.at(5, L0, Strategy::qubit_all_keep).average_fidelity,
              t.at(5, L0, Strategy::qudit).average_fidelity)};
}

Verdict qudit_tracks_one_shot(const Table& t) {
  // The qudit photon sees sigma_X(m) before the Fourier measurement, a
  // one-shot link sees sigma_X(1). The extra dephasing can cost at most
  // (1 - exp(-(sigma_m^2 - sigma_1^2) / 2)) / 2 of pair fidelity.
  const DetectionParams det = campaign_spec().base.detection;
  bool ok = true;
  double worst_margin = 1.0;
  std::string where;
  for (int m : t.ms) {
    const double s1 = det.sigma_x(1), sm = det.sigma_x(m);
    const double penalty = 0.5 * (1.0 - std::exp(-(sm * sm - s1 * s1) / 2.0));
    for (double L : t.Ls) {
      const auto& q = t.at(m, L, Strategy::qudit);
      const auto& os = t.at(m, L, Strategy::qubit_one_shot);
      const double se = std::hypot(q.fidelity_stderr, os.fidelity_stderr);
      const double lo = os.average_fidelity - penalty - 3.0 * se;
      const double hi = os.average_fidelity + 3.0 * se;
      const double margin = std::min(q.average_fidelity - lo, hi - q.average_fidelity);
      if (margin < worst_margin) {
        worst_margin = margin;
        where = fmt("m=%d L=%.0f: qudit %.4f in [%.4f, %.4f]", m, L, q.average_fidelity, lo, hi);
      }
      ok = ok && margin >= 0.0;
    }
  }
  return {ok, fmt("tightest point %s, margin %.4f", where.c_str(), worst_margin)};
}

Verdict one_shot_attempts(const Table& t) {
  bool ok = true;
  double ratio = 1e300;
  for (int m : t.ms) {
    if (m < 2) continue;
    for (double L : t.Ls) {
      if (L < 40.0) continue;
      const double os = t.at(m, L, Strategy::qubit_one_shot).average_attempts;
      const double other = std::max(t.at(m, L, Strategy::qudit).average_attempts,
                                    t.at(m, L, Strategy::qubit_all_keep).average_attempts);
      ok = ok && os > other;
      ratio = std::min(ratio, os / other);
    }
  }
  return {ok, fmt("smallest one-shot / max(other) attempts ratio %.3g", ratio)};
}

Verdict all_keep_attempts(const Table& t) {
  // Per-link herald probability from the exact density-matrix oracle.
  const ProtocolConfig base = campaign_spec().base;
  double worst = 0.0;
  std::string where;
  for (double L : t.Ls) {
    ProtocolConfig link = base;
    link.m = 1;
    link.distance_km = L;
    const double p = exact_run(link).herald_probability;
    for (int m : t.ms) {
      const double expect = expected_max_geometric(m, p);
      const double got = t.at(m, L, Strategy::qubit_all_keep).average_attempts;
      const double rel = std::abs(got / expect - 1.0);
      if (rel > worst) {
        worst = rel;
        where = fmt("m=%d L=%.0f: %.3f vs %.3f", m, L, got, expect);
      }
    }
  }
  return {worst < 0.01, fmt("max rel deviation %.3f%% at %s", 100.0 * worst, where.c_str())};
}

Verdict determinism(const fs::path& cache) {
  const fs::path a = cache / "campaign_a" / "results.csv";
  if (!fs::exists(a)) run_campaign(cache / "campaign_a", nullptr);
  double s = 0.0;
  const fs::path b = run_campaign(cache / "campaign_b", &s);
  const std::string x = slurp(a), y = slurp(b);
  return {!x.empty() && x == y, fmt("second run %.0f s, %zu bytes, %s", s, y.size(),
                                    x == y ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qudit-net acceptance criteria"};
  std::string only;
  std::string cache = (fs::temp_directory_path() / "qn_acceptance").string();
  app.add_option("--only", only, "run a single criterion");
  app.add_option("--cache", cache, "directory for campaign CSVs");
  bool list = false;
  app.add_flag("--list", list, "print criterion names");
  CLI11_PARSE(app, argc, argv);

  const fs::path dir(cache);
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"ideal_pipeline", ideal_pipeline},
      {"reflection_gold", reflection_gold},
      {"source_physics", source_physics},
      {"qft", qft},
      {"oracle_equivalence", oracle_equivalence},
      {"channel_math", channel_math},
      {"scaling_law", scaling_law},
      {"campaign", [&] { return campaign(dir); }},
      {"qudit_fidelity_flat", [&] { return qudit_fidelity_flat(load_campaign(dir)); }},
      {"all_keep_decay", [&] { return all_keep_decay(load_campaign(dir)); }},
      {"qudit_tracks_one_shot", [&] { return qudit_tracks_one_shot(load_campaign(dir)); }},
      {"one_shot_attempts", [&] { return one_shot_attempts(load_campaign(dir)); }},
      {"all_keep_attempts", [&] { return all_keep_attempts(load_campaign(dir)); }},
      {"determinism", [&] { return determinism(dir); }},
  };
  if (list) {
    for (const auto& [name, fn] : criteria) std::printf("%s\n", name.c_str());
    return 0;
  }
  if (!only.empty() && std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == only; })) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }

  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && name != only) continue;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
