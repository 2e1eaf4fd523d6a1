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

#include "qudit_net/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

namespace qn {

namespace {

constexpr std::int64_t kChunk = 512;
constexpr int kMaxCampaignRounds = 100'000'000;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Runs fn(begin, end) over fixed chunks and returns the results in chunk
// order, so merging them is independent of the thread count.
template <class Acc, class Fn>
std::vector<Acc> run_chunks(std::int64_t n, int threads, Fn fn) {
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Acc> out(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::int64_t c = next++; c < chunks; c = next++) {
      try {
        out[static_cast<std::size_t>(c)] = fn(c * kChunk, std::min(n, (c + 1) * kChunk));
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = chunks;
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::int64_t>(std::max(threads, 1), chunks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// Running sums of per-pair states and fidelities. "Joint" samples carry all
// pairs of one trajectory together, so the average over pairs gets an honest
// standard error when the pairs are correlated.
struct PairAccumulator {
  std::vector<std::int64_t> count;
  std::vector<Eigen::Matrix4cd> rho_sum;
  std::vector<double> f_sum, f_sq;
  std::int64_t joint_count = 0;
  double joint_sum = 0.0, joint_sq = 0.0;

  PairAccumulator() = default;
  explicit PairAccumulator(int m)
      : count(static_cast<std::size_t>(m), 0),
        rho_sum(static_cast<std::size_t>(m), Eigen::Matrix4cd::Zero()),
        f_sum(static_cast<std::size_t>(m), 0.0),
        f_sq(static_cast<std::size_t>(m), 0.0) {}

  double add(std::size_t p, const Eigen::Matrix4cd& rho) {
    const double f = fidelity_to_bell(rho);
    ++count[p];
    rho_sum[p] += rho;
    f_sum[p] += f;
    f_sq[p] += f * f;
    return f;
  }

  void add_joint(std::span<const Eigen::Matrix4cd> rhos) {
    double mean = 0.0;
    for (std::size_t p = 0; p < rhos.size(); ++p) mean += add(p, rhos[p]);
    mean /= static_cast<double>(rhos.size());
    ++joint_count;
    joint_sum += mean;
    joint_sq += mean * mean;
  }

  void merge(const PairAccumulator& o) {
    if (count.empty()) {
      *this = o;
      return;
    }
    if (o.count.empty()) return;
    for (std::size_t p = 0; p < count.size(); ++p) {
      count[p] += o.count[p];
      rho_sum[p] += o.rho_sum[p];
      f_sum[p] += o.f_sum[p];
      f_sq[p] += o.f_sq[p];
    }
    joint_count += o.joint_count;
    joint_sum += o.joint_sum;
    joint_sq += o.joint_sq;
  }

  PairMetrics finalize() const {
    PairMetrics pm;
    const std::size_t m = count.size();
    double var_of_mean_sum = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      if (count[p] == 0) throw EstimationError("no heralded attempts for pair " + std::to_string(p));
      const double n = static_cast<double>(count[p]);
      const double mean = f_sum[p] / n;
      const double var = n > 1 ? std::max(0.0, (f_sq[p] - n * mean * mean) / (n - 1.0)) : 0.0;
      const Eigen::Matrix4cd rho = rho_sum[p] / n;
      pm.per_pair_fidelity.push_back(std::clamp(mean, 0.0, 1.0));
      pm.per_pair_stderr.push_back(std::sqrt(var / n));
      pm.per_pair_phase.push_back(std::arg(rho(0, 3)));
      pm.per_pair_rho.push_back(rho);
      var_of_mean_sum += var / n;
    }
    double avg = 0.0;
    for (double f : pm.per_pair_fidelity) avg += f;
    pm.average_fidelity = avg / static_cast<double>(m);
    if (joint_count > 1) {
      const double n = static_cast<double>(joint_count);
      const double mean = joint_sum / n;
      const double var = std::max(0.0, (joint_sq - n * mean * mean) / (n - 1.0));
      pm.standard_error = std::sqrt(var / n);
    } else {
      pm.standard_error = std::sqrt(var_of_mean_sum) / static_cast<double>(m);
    }
    return pm;
  }
};

std::vector<PairMemoryChannel> fixed_wait_channels(const ProtocolConfig& cfg, int m) {
  const WaitTimes w = assign_wait_times(Strategy::qudit, m, nullptr, cfg.distance_km,
                                        cfg.c_fiber_km_s);
  std::vector<PairMemoryChannel> out;
  for (int p = 0; p < m; ++p) {
    out.emplace_back(w.alice[static_cast<std::size_t>(p)], w.bob[static_cast<std::size_t>(p)],
                     cfg.channel);
  }
  return out;
}

void fill_geometric_rates(RateMetrics& r, double p, std::int64_t n) {
  r.success_probability = p;
  r.success_stderr = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  r.average_attempts = 1.0 / p;
  r.attempts_stderr = r.success_stderr / (p * p);
  for (std::size_t i = 0; i < kAttemptQuantiles.size(); ++i) {
    r.attempts_quantiles[i] = geometric_quantile(p, kAttemptQuantiles[i]);
  }
}

AttemptOutcome lost(LossCause cause) {
  return AttemptOutcome{MeasurementOutcome{false, -1, cause}, std::nullopt};
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::qudit: return "qudit";
    case Strategy::qubit_all_keep: return "qubit_all_keep";
    case Strategy::qubit_one_shot: return "qubit_one_shot";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "qudit") return Strategy::qudit;
  if (text == "qubit_all_keep" || text == "all_keep") return Strategy::qubit_all_keep;
  if (text == "qubit_one_shot" || text == "one_shot") return Strategy::qubit_one_shot;
  return std::nullopt;
}

void ProtocolConfig::validate() const {
  require(m >= 1 && m <= kMaxEngineM,
          "m: engine supports 1 <= m <= " + std::to_string(kMaxEngineM) + ", got " +
              std::to_string(m));
  require(distance_km >= 0.0 && std::isfinite(distance_km), "distance_km must be finite and >= 0");
  require(attenuation_km > 0.0, "fiber.attenuation_km must be positive");
  require(c_fiber_km_s > 0.0, "fiber.speed_km_s must be positive");
  require(n_trajectories >= 1, "trajectories must be at least 1");
  require(threads >= 1, "threads must be at least 1");
  source.validate();
  gate.validate();
  sw.validate();
  detection.validate();
  channel.validate();
}

ReflectionPair ProtocolConfig::reflection() const {
  return reflection_override ? *reflection_override : reflection_coefficients(gate);
}

ProtocolConfig ProtocolConfig::ideal(int m) {
  ProtocolConfig c;
  c.m = m;
  c.distance_km = 0.0;
  c.source.sigma_a = 0.0;
  c.source.sigma_p = 0.0;
  c.sw = SwitchParams{1.0, 0.0};
  c.detection.eta_lag = 0.0;
  c.detection.sigma_x_per_level = 0.0;
  c.channel.t1 = std::numeric_limits<double>::infinity();
  c.channel.tp = std::numeric_limits<double>::infinity();
  c.reflection_override = ReflectionPair{-1.0, 1.0};
  return c;
}

std::vector<double> correction_phases(int k, int m) {
  require(m >= 1 && m <= 30, "correction_phases: m out of range");
  const std::int64_t n = std::int64_t{1} << m;
  require(k >= 0 && k < n, "correction_phases: k out of range");
  std::vector<double> out;
  for (int p = 0; p < m; ++p) {
    const std::int64_t turns = ((std::int64_t{1} << p) * k) % n;  // in units of 2 pi / N
    out.push_back(std::numbers::pi * static_cast<double>(turns) / static_cast<double>(n / 2));
  }
  return out;
}

double hit_transmission(const ReflectionPair& r) {
  return 0.5 * (std::norm(r.r0) + std::norm(r.r1));
}

std::vector<double> nominal_bin_transmissions(int m, const ReflectionPair& r,
                                              const DetectionParams& det) {
  const double h = hit_transmission(r);
  std::vector<double> t(std::size_t{1} << m);
  for (std::size_t l = 0; l < t.size(); ++l) {
    t[l] = std::pow(h, 2 * std::popcount(l)) * loop_transmission(static_cast<int>(l), m, det);
  }
  return t;
}

AttemptPipeline::AttemptPipeline(const ProtocolConfig& cfg)
    : m(cfg.m),
      bins(std::size_t{1} << cfg.m),
      r(cfg.reflection()),
      source(cfg.source),
      sw(cfg.sw),
      fiber(fiber_transmission(cfg.distance_km, cfg.attenuation_km)),
      detector_efficiency(cfg.detection.detector_efficiency),
      sigma_x(cfg.detection.sigma_x(cfg.m)),
      layout(HilbertLayout::protocol(cfg.m, true)),
      register_layout(HilbertLayout::protocol(cfg.m, false)) {
  cfg.validate();
  base = cfg.precompensate
             ? precompensated_amplitudes(nominal_bin_transmissions(m, r, cfg.detection))
             : QuditAmplitudes::uniform(m);
  for (std::size_t l = 0; l < bins; ++l) {
    loop_amplitude.push_back(std::sqrt(loop_transmission(static_cast<int>(l), m, cfg.detection)));
  }
  for (std::size_t k = 0; k < bins; ++k) {
    std::vector<CMatrix> per_pair;
    for (double phi : correction_phases(static_cast<int>(k), m)) {
      CMatrix z = CMatrix::Identity(2, 2);
      z(1, 1) = std::polar(1.0, phi);
      per_pair.push_back(std::move(z));
    }
    corrections.push_back(std::move(per_pair));
  }
}

AttemptOutcome run_qudit_attempt(const AttemptPipeline& pipe, Rng& rng) {
  const int m = pipe.m;
  const auto mm = static_cast<std::size_t>(m);

  // Photon-number losses and switch timing do not depend on the state, so
  // they are drawn first and end the attempt early.
  std::array<SwitchOutcome, kMaxEngineM> alice{}, bob{};
  for (int i = m - 1; i >= 0; --i) {
    alice[static_cast<std::size_t>(i)] = sample_switch(pipe.sw, rng);
    if (alice[static_cast<std::size_t>(i)] == SwitchOutcome::lost) return lost(LossCause::switch_loss);
  }
  if (uniform01(rng) >= pipe.fiber) return lost(LossCause::fiber);
  for (int i = m - 1; i >= 0; --i) {
    bob[static_cast<std::size_t>(i)] = sample_switch(pipe.sw, rng);
    if (bob[static_cast<std::size_t>(i)] == SwitchOutcome::lost) return lost(LossCause::switch_loss);
  }
  for (int i = 0; i < m; ++i) {
    const SwitchOutcome s = sample_switch(pipe.sw, rng);
    if (s == SwitchOutcome::lost) return lost(LossCause::switch_loss);
    if (s == SwitchOutcome::wrong) return lost(LossCause::wrong_switch_timing);
  }
  if (uniform01(rng) >= pipe.detector_efficiency) return lost(LossCause::detector);

  const QuditAmplitudes photon = sample_noisy_qudit(m, pipe.base, pipe.source, rng);
  const std::size_t reg_dim = pipe.register_layout.total_dim();
  const double spin_amp = 1.0 / static_cast<double>(std::size_t{1} << m);
  CVector amps(static_cast<Eigen::Index>(pipe.bins * reg_dim));
  for (std::size_t l = 0; l < pipe.bins; ++l) {
    amps.segment(static_cast<Eigen::Index>(l * reg_dim), static_cast<Eigen::Index>(reg_dim))
        .setConstant(photon.amps[static_cast<Eigen::Index>(l)] * spin_amp);
  }
  PureState psi(std::move(amps), pipe.layout);

  register_interaction_sampled(psi, Side::alice, m, pipe.r, std::span(alice.data(), mm));
  register_interaction_sampled(psi, Side::bob, m, pipe.r, std::span(bob.data(), mm));

  const double before_loops = psi.norm_squared();
  for (std::size_t l = 0; l < pipe.bins; ++l) {
    psi.amplitudes()
        .segment(static_cast<Eigen::Index>(l * reg_dim), static_cast<Eigen::Index>(reg_dim)) *=
        pipe.loop_amplitude[l];
  }
  interferometer_dephase_sampled(psi, 0, pipe.sigma_x, rng);

  const double u = uniform01(rng);
  QftResult res = qft_measure(psi, u, LossCause::cavity);
  if (!res.outcome.heralded) {
    return lost(u < before_loops ? LossCause::loop : LossCause::cavity);
  }
  PureState reg = std::move(*res.remainder);
  reg.set_branch_weight(1.0);
  const auto& fix = pipe.corrections[static_cast<std::size_t>(res.outcome.k)];
  for (int p = 0; p < m; ++p) {
    apply_local(reg, fix[static_cast<std::size_t>(p)],
                pipe.register_layout.index_of(bob_label(p)));
  }
  return AttemptOutcome{res.outcome, std::move(reg)};
}

AttemptOutcome run_qudit_attempt(const ProtocolConfig& cfg, Rng& rng) {
  return run_qudit_attempt(AttemptPipeline(cfg), rng);
}

Eigen::Matrix4cd pair_density(const PureState& registers, int m, int p) {
  require(registers.layout().total_dim() == (std::size_t{1} << (2 * m)),
          "pair_density: register has the wrong dimension");
  require(p >= 0 && p < m, "pair_density: pair index out of range");
  const std::size_t a_bit = std::size_t{1} << (m + p);
  const std::size_t b_bit = std::size_t{1} << p;
  const CVector& psi = registers.amplitudes();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  Eigen::Vector4cd v;
  for (std::size_t i = 0; i < static_cast<std::size_t>(psi.size()); ++i) {
    if ((i & a_bit) || (i & b_bit)) continue;
    v << psi[static_cast<Eigen::Index>(i)], psi[static_cast<Eigen::Index>(i | b_bit)],
        psi[static_cast<Eigen::Index>(i | a_bit)], psi[static_cast<Eigen::Index>(i | a_bit | b_bit)];
    rho.noalias() += v * v.adjoint();
  }
  return rho;
}

Estimate run_qudit_strategy(const ProtocolConfig& cfg) {
  cfg.validate();
  const AttemptPipeline pipe(cfg);
  const auto channels = fixed_wait_channels(cfg, cfg.m);

  struct Acc {
    PairAccumulator pairs;
    std::int64_t n = 0, heralds = 0;
    std::vector<std::int64_t> outcomes;
    std::array<std::int64_t, 7> losses{};
  };
  const auto parts = run_chunks<Acc>(cfg.n_trajectories, cfg.threads,
                                     [&](std::int64_t begin, std::int64_t end) {
    Acc a;
    a.pairs = PairAccumulator(cfg.m);
    a.outcomes.assign(pipe.bins, 0);
    std::vector<Eigen::Matrix4cd> rhos(static_cast<std::size_t>(cfg.m));
    for (std::int64_t t = begin; t < end; ++t) {
      Rng rng = trajectory_stream(cfg.seed, static_cast<std::uint64_t>(t));
      const AttemptOutcome o = run_qudit_attempt(pipe, rng);
      ++a.n;
      if (!o.outcome.heralded) {
        ++a.losses[static_cast<std::size_t>(o.outcome.loss_cause)];
        continue;
      }
      ++a.heralds;
      ++a.outcomes[static_cast<std::size_t>(o.outcome.k)];
      for (int p = 0; p < cfg.m; ++p) {
        rhos[static_cast<std::size_t>(p)] =
            channels[static_cast<std::size_t>(p)].apply(pair_density(*o.registers, cfg.m, p));
      }
      a.pairs.add_joint(rhos);
    }
    return a;
  });

  Acc total;
  total.pairs = PairAccumulator(cfg.m);
  total.outcomes.assign(pipe.bins, 0);
  for (const Acc& a : parts) {
    total.pairs.merge(a.pairs);
    total.n += a.n;
    total.heralds += a.heralds;
    for (std::size_t k = 0; k < a.outcomes.size(); ++k) total.outcomes[k] += a.outcomes[k];
    for (std::size_t c = 0; c < a.losses.size(); ++c) total.losses[c] += a.losses[c];
  }
  if (total.heralds == 0) throw EstimationError("no heralded attempts in the whole campaign");

  Estimate e;
  e.pairs = total.pairs.finalize();
  e.rates.n_trajectories = total.n;
  e.rates.n_heralded = total.heralds;
  e.rates.outcome_counts = total.outcomes;
  e.rates.loss_counts = total.losses;
  fill_geometric_rates(e.rates, static_cast<double>(total.heralds) / static_cast<double>(total.n),
                       total.n);
  return e;
}

ProtocolConfig link_config(const ProtocolConfig& cfg) {
  ProtocolConfig link = cfg;
  link.m = 1;
  link.strategy = Strategy::qudit;
  return link;
}

Estimate run_qubit_strategy(const ProtocolConfig& cfg) {
  require(cfg.strategy != Strategy::qudit, "run_qubit_strategy: strategy must be a qubit variant");
  cfg.validate();
  const int m = cfg.m;
  const auto mm = static_cast<std::size_t>(m);
  const ProtocolConfig link = link_config(cfg);
  const AttemptPipeline pipe(link);
  const bool all_keep = cfg.strategy == Strategy::qubit_all_keep;
  const auto fixed = fixed_wait_channels(cfg, 1);

  struct Acc {
    PairAccumulator pairs;
    std::int64_t n = 0;
    std::int64_t joint = 0;
    std::vector<std::int64_t> link_attempts, link_heralds;
    std::array<std::int64_t, 7> losses{};
    std::vector<int> rounds;  // all-keep: final round per campaign
  };

  const auto parts = run_chunks<Acc>(cfg.n_trajectories, cfg.threads,
                                     [&](std::int64_t begin, std::int64_t end) {
    Acc a;
    a.pairs = PairAccumulator(m);
    a.link_attempts.assign(mm, 0);
    a.link_heralds.assign(mm, 0);
    std::vector<Eigen::Matrix4cd> raw(mm), rhos(mm);
    for (std::int64_t t = begin; t < end; ++t) {
      Rng rng = trajectory_stream(cfg.seed, static_cast<std::uint64_t>(t));
      ++a.n;
      auto attempt = [&](std::size_t j) {
        ++a.link_attempts[j];
        AttemptOutcome o = run_qudit_attempt(pipe, rng);
        if (!o.outcome.heralded) {
          ++a.losses[static_cast<std::size_t>(o.outcome.loss_cause)];
          return false;
        }
        ++a.link_heralds[j];
        raw[j] = pair_density(*o.registers, 1, 0);
        return true;
      };

      if (!all_keep) {
        // One volley of m links; each heralded link is a sample of that link's
        // pair state, independent of the others.
        int ok = 0;
        for (std::size_t j = 0; j < mm; ++j) {
          if (attempt(j)) {
            a.pairs.add(j, fixed[0].apply(raw[j]));
            ++ok;
          }
        }
        if (ok == m) ++a.joint;
        continue;
      }

      RoundsRecord rec;
      rec.success_round.assign(mm, 0);
      int remaining = m;
      int round = 0;
      while (remaining > 0) {
        if (++round > kMaxCampaignRounds) {
          throw EstimationError("all-keep campaign did not finish; success probability too small");
        }
        for (std::size_t j = 0; j < mm; ++j) {
          if (rec.success_round[j] == 0 && attempt(j)) {
            rec.success_round[j] = round;
            --remaining;
          }
        }
      }
      rec.final_round = round;
      const WaitTimes w = assign_wait_times(Strategy::qubit_all_keep, m, &rec, cfg.distance_km,
                                            cfg.c_fiber_km_s);
      for (std::size_t j = 0; j < mm; ++j) {
        rhos[j] = memory_channel_pair(raw[j], w.alice[j], w.bob[j], cfg.channel);
      }
      a.pairs.add_joint(rhos);
      a.rounds.push_back(round);
    }
    return a;
  });

  Acc total;
  total.pairs = PairAccumulator(m);
  total.link_attempts.assign(mm, 0);
  total.link_heralds.assign(mm, 0);
  for (const Acc& a : parts) {
    total.pairs.merge(a.pairs);
    total.n += a.n;
    total.joint += a.joint;
    for (std::size_t j = 0; j < mm; ++j) {
      total.link_attempts[j] += a.link_attempts[j];
      total.link_heralds[j] += a.link_heralds[j];
    }
    for (std::size_t c = 0; c < a.losses.size(); ++c) total.losses[c] += a.losses[c];
    total.rounds.insert(total.rounds.end(), a.rounds.begin(), a.rounds.end());
  }

  Estimate e;
  RateMetrics& r = e.rates;
  r.n_trajectories = total.n;
  r.loss_counts = total.losses;
  r.joint_round_successes = total.joint;
  for (std::size_t j = 0; j < mm; ++j) {
    r.n_heralded += total.link_heralds[j];
    r.per_link_success.push_back(static_cast<double>(total.link_heralds[j]) /
                                 static_cast<double>(total.link_attempts[j]));
  }
  if (r.n_heralded == 0) throw EstimationError("no heralded attempts in the whole campaign");
  e.pairs = total.pairs.finalize();

  if (!all_keep) {
    // Links are independent, so the product of per-link frequencies is an
    // unbiased estimate of the joint success and far less noisy than the
    // literal joint count.
    double p = 1.0, rel_var = 0.0;
    for (std::size_t j = 0; j < mm; ++j) {
      const double pj = r.per_link_success[j];
      p *= pj;
      rel_var += (1.0 - pj) / (pj * static_cast<double>(total.link_attempts[j]));
    }
    fill_geometric_rates(r, p, total.n);
    r.success_stderr = p * std::sqrt(rel_var);
    r.attempts_stderr = r.success_stderr / (p * p);
    return e;
  }

  const double n = static_cast<double>(total.rounds.size());
  double sum = 0.0, sq = 0.0;
  for (int k : total.rounds) {
    sum += k;
    sq += static_cast<double>(k) * k;
  }
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
  r.average_attempts = mean;
  r.attempts_stderr = std::sqrt(var / n);
  r.success_probability = 1.0 / mean;
  r.success_stderr = r.attempts_stderr / (mean * mean);
  std::vector<int> sorted = total.rounds;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < kAttemptQuantiles.size(); ++i) {
    const auto rank = static_cast<std::size_t>(std::ceil(kAttemptQuantiles[i] * n));
    r.attempts_quantiles[i] = sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
  }
  return e;
}

Estimate estimate_metrics(const ProtocolConfig& cfg) {
  return cfg.strategy == Strategy::qudit ? run_qudit_strategy(cfg) : run_qubit_strategy(cfg);
}

double analytic_herald_probability(const ProtocolConfig& cfg) {
  cfg.validate();
  const int m = cfg.m;
  const ReflectionPair r = cfg.reflection();
  const QuditAmplitudes base =
      cfg.precompensate
          ? precompensated_amplitudes(nominal_bin_transmissions(m, r, cfg.detection))
          : QuditAmplitudes::uniform(m);
  const double h = hit_transmission(r);
  const double w_correct = cfg.sw.eta_sw * (1.0 - cfg.sw.e_sw);
  const double w_wrong = cfg.sw.eta_sw * cfg.sw.e_sw;
  double sum = 0.0;
  for (std::size_t l = 0; l < base.dim(); ++l) {
    double bin = std::norm(base.amps[static_cast<Eigen::Index>(l)]);
    for (int i = 0; i < m; ++i) {
      const bool set = ((l >> i) & 1U) != 0;
      const double stage = w_correct * (set ? h : 1.0) + w_wrong * (set ? 1.0 : h);
      bin *= stage * stage;  // one pass on each side
    }
    sum += bin * loop_transmission(static_cast<int>(l), m, cfg.detection);
  }
  return sum * fiber_transmission(cfg.distance_km, cfg.attenuation_km) *
         std::pow(w_correct, m) * cfg.detection.detector_efficiency;
}

double geometric_quantile(double p, double q) {
  require(p > 0.0 && p <= 1.0, "geometric_quantile: p must lie in (0, 1]");
  require(q > 0.0 && q < 1.0, "geometric_quantile: q must lie in (0, 1)");
  if (p >= 1.0) return 1.0;
  return std::max(1.0, std::ceil(std::log1p(-q) / std::log1p(-p) - 1e-12));
}

}  // namespace qn
