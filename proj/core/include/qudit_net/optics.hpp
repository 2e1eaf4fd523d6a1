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

// Optical hardware between emitter and detector: routing switches, fiber,
// the delay-loop interferometer and the Fourier-basis photon measurement.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qudit_net/qstate.hpp"
#include "qudit_net/rng.hpp"

namespace qn {

struct SwitchParams {
  double eta_sw = 0.9;   // transmission per pass
  double e_sw = 0.01;    // fraction leaked to the wrong port

  void validate() const;
};

enum class SwitchOutcome : std::uint8_t { correct, wrong, lost };

/// Which time bins a switch sends into the cavity arm.
struct BinRouting {
  std::vector<bool> to_cavity;

  /// Bins whose binary digit `bit` is 1, for a 2^m-bin qudit.
  static BinRouting for_stage(int m, int bit);
  BinRouting inverted() const;
};

struct SwitchBranch {
  SwitchOutcome outcome;
  double weight;
  std::optional<BinRouting> routing;  // empty for the lost branch
};

/// Incoherent switch model: correct routing with weight eta(1-e), complete
/// inversion of the routing with weight eta*e, loss with weight 1-eta.
std::array<SwitchBranch, 3> switch_channel(const SwitchParams& p, const BinRouting& intended);

/// Samples one switch pass using a single uniform draw.
SwitchOutcome sample_switch(const SwitchParams& p, Rng& rng);

/// exp(-L / L_att).
double fiber_transmission(double length_km, double attenuation_km);

enum class LoopRule : std::uint8_t { align_to_last };

struct DetectionParams {
  double eta_lag = 0.01;           // loss per fiber loop
  double sigma_x_per_level = 0.1;  // interferometer dephasing is this times m
  double detector_efficiency = 1.0;
  LoopRule loops = LoopRule::align_to_last;

  double sigma_x(int m) const { return sigma_x_per_level * m; }
  int loops_for_bin(int bin, int m) const;
  void validate() const;
};

/// (eta_sw (1 - e_sw))^m (1 - eta_lag)^loops(l); detector efficiency excluded.
double detection_transmission_per_bin(int bin, int m, const SwitchParams& sw,
                                      const DetectionParams& det);

/// Loop part only, (1 - eta_lag)^loops(l).
double loop_transmission(int bin, int m, const DetectionParams& det);

enum class LossCause : std::uint8_t {
  none,
  fiber,
  switch_loss,
  cavity,
  loop,
  detector,
  wrong_switch_timing
};

std::string_view to_string(LossCause cause);

struct MeasurementOutcome {
  bool heralded = false;
  int k = -1;  // valid only when heralded
  LossCause loss_cause = LossCause::none;
};

/// Multiplies photon coherences <l|.|l'> (l != l') of the photon factor by
/// exp(-sigma_x^2 / 2).
DensityOperator interferometer_dephase_exact(const DensityOperator& rho, std::size_t photon,
                                             double sigma_x);
void interferometer_dephase_exact(CMatrix& rho, const HilbertLayout& layout, std::size_t photon,
                                  double sigma_x);

/// Random phase exp(i theta_l) on photon bin l with theta_l ~ N(0, sigma_x^2/2),
/// so that pairwise phase differences have variance sigma_x^2 and the
/// ensemble matches interferometer_dephase_exact.
void interferometer_dephase_sampled(PureState& psi, std::size_t photon, double sigma_x, Rng& rng);

/// N x N matrix whose column k is X_k = N^{-1/2} sum_l w^{kl} |l>,
/// w = exp(i pi / 2^{m-1}). Symmetric, so row k is X_k as well.
CMatrix qft_matrix(int m);
CVector qft_basis_vector(int m, int k);

/// branch_weight * |<X_k|psi>|^2 for every k, with the photon as the first
/// factor of psi. The sum equals psi.mass().
std::vector<double> qft_outcome_probabilities(const PureState& psi);

struct QftResult {
  MeasurementOutcome outcome;
  /// Normalized state of the remaining factors; empty unless heralded.
  std::optional<PureState> remainder;
};

/// Samples a Fourier-basis outcome for the photon (first factor). Draws one
/// uniform u: u < p_0 + ... + p_k selects k; u beyond the branch norm is a
/// non-detection, attributed to `no_click_cause`.
QftResult qft_measure(const PureState& psi, Rng& rng, LossCause no_click_cause = LossCause::detector);
/// Same with the uniform draw supplied by the caller.
QftResult qft_measure(const PureState& psi, double u, LossCause no_click_cause);

/// <X_k| applied to the photon factor without normalization.
PureState project_photon_onto(const PureState& psi, int k);

}  // namespace qn
