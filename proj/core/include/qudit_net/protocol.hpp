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

// Protocol orchestration and the Monte Carlo trajectory engine.
//
// One qudit attempt: a noisy 2^m-bin photon leaves Alice, scatters off her m
// cavities, crosses the fiber, scatters off Bob's m cavities and is measured
// in the Fourier basis after the delay loops. A click heralds m Bell pairs up
// to known phases, which are undone with single-qubit Z rotations on Bob.
//
// The qubit baselines run the same hardware at m = 1, once per link.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qudit_net/cavity.hpp"
#include "qudit_net/channels.hpp"
#include "qudit_net/optics.hpp"
#include "qudit_net/qstate.hpp"
#include "qudit_net/rng.hpp"
#include "qudit_net/source.hpp"

namespace qn {

inline constexpr int kMaxEngineM = 6;

std::string_view to_string(Strategy s);
/// Accepts "qudit", "all_keep"/"qubit_all_keep", "one_shot"/"qubit_one_shot".
std::optional<Strategy> parse_strategy(std::string_view text);

struct ProtocolConfig {
  int m = 2;
  double distance_km = 20.0;
  double attenuation_km = 20.0;
  double c_fiber_km_s = 2e5;
  SourceParams source;
  GateParams gate;
  SwitchParams sw;
  DetectionParams detection;
  ChannelParams channel;
  Strategy strategy = Strategy::qudit;
  std::int64_t n_trajectories = 100000;
  std::uint64_t seed = 1;
  bool precompensate = true;
  /// Replaces reflection_coefficients(gate), e.g. (-1, +1) for an ideal gate.
  std::optional<ReflectionPair> reflection_override;
  int threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  ReflectionPair reflection() const;

  /// Lossless, noiseless hardware with an ideal gate at zero distance.
  static ProtocolConfig ideal(int m);
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Angle phi_p of the Z rotation diag(1, e^{i phi_p}) on Bob's qubit p that
/// removes the phase w^{-2^p k} left on |11> by outcome k.
std::vector<double> correction_phases(int k, int m);

/// Norm factor of one cavity pass for a spin in |+>: (|r0|^2 + |r1|^2) / 2.
double hit_transmission(const ReflectionPair& r);

/// Per-bin transmission of the intended routing: cavity passes on both sides
/// times the delay loops. Switch and fiber losses are bin independent.
std::vector<double> nominal_bin_transmissions(int m, const ReflectionPair& r,
                                              const DetectionParams& det);

/// Everything about one attempt that does not depend on the random draws.
struct AttemptPipeline {
  int m = 0;
  std::size_t bins = 0;
  ReflectionPair r{};
  QuditAmplitudes base;
  SourceParams source;
  SwitchParams sw;
  double fiber = 1.0;
  double detector_efficiency = 1.0;
  double sigma_x = 0.0;
  std::vector<double> loop_amplitude;  // sqrt of the loop transmission per bin
  HilbertLayout layout;
  HilbertLayout register_layout;
  std::vector<std::vector<CMatrix>> corrections;  // [k][p]

  explicit AttemptPipeline(const ProtocolConfig& cfg);
};

struct AttemptOutcome {
  MeasurementOutcome outcome;
  /// Phase-corrected 2m-qubit register state, normalized; set iff heralded.
  std::optional<PureState> registers;
};

AttemptOutcome run_qudit_attempt(const AttemptPipeline& pipe, Rng& rng);
AttemptOutcome run_qudit_attempt(const ProtocolConfig& cfg, Rng& rng);

/// Reduced state of qubits (A_p, B_p) of a normalized register state.
Eigen::Matrix4cd pair_density(const PureState& registers, int m, int p);

struct PairMetrics {
  std::vector<double> per_pair_fidelity;
  std::vector<double> per_pair_stderr;
  /// arg <00|rho|11> of the averaged pair state; 0 when the phases are fully
  /// corrected.
  std::vector<double> per_pair_phase;
  std::vector<Eigen::Matrix4cd> per_pair_rho;  // after the memory channel
  double average_fidelity = 0.0;
  double standard_error = 0.0;
};

struct RateMetrics {
  double success_probability = 0.0;
  double success_stderr = 0.0;
  double average_attempts = 0.0;
  double attempts_stderr = 0.0;
  std::array<double, 3> attempts_quantiles{};  // 50 %, 90 %, 99 %
  std::int64_t n_trajectories = 0;
  std::int64_t n_heralded = 0;
  std::vector<double> per_link_success;  // qubit strategies only
  std::int64_t joint_round_successes = 0;  // one-shot only
  std::vector<std::int64_t> outcome_counts;  // qudit: heralds per k
  std::array<std::int64_t, 7> loss_counts{};  // indexed by LossCause
};

inline constexpr std::array<double, 3> kAttemptQuantiles{0.5, 0.9, 0.99};

struct Estimate {
  PairMetrics pairs;
  RateMetrics rates;
};

/// Dispatches on cfg.strategy. Throws EstimationError if nothing heralds.
Estimate estimate_metrics(const ProtocolConfig& cfg);
Estimate run_qudit_strategy(const ProtocolConfig& cfg);
Estimate run_qubit_strategy(const ProtocolConfig& cfg);

/// The single-link configuration used by the qubit strategies.
ProtocolConfig link_config(const ProtocolConfig& cfg);

/// Herald probability with source noise off, from the per-stage switch
/// mixture, the cavity norm factors, fiber, detection and loops.
double analytic_herald_probability(const ProtocolConfig& cfg);

/// Smallest n with 1 - (1 - p)^n >= q.
double geometric_quantile(double p, double q);

}  // namespace qn
