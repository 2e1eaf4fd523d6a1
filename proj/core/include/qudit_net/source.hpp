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

// Time-bin qudit source: a Lambda emitter (|g>, |e>, |f>) in a cavity driven
// by a square laser pulse on g-e, with the cavity on e-f.

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qudit_net/qstate.hpp"
#include "qudit_net/rng.hpp"

namespace qn {

struct SourceParams {
  Complex drive{1e9, 0.0};        // laser coupling Omega (rad/s)
  double detuning = 0.0;          // one-photon detuning Delta (rad/s)
  double raman_detuning = 0.0;    // two-photon detuning delta (rad/s)
  Complex coupling{3.1622776601683795e10, 0.0};  // emitter-cavity g (rad/s)
  double gamma_g = 5e7;           // e -> g (rad/s)
  double gamma_f = 5e7;           // e -> f (rad/s)
  double kappa = 1e11;            // total cavity decay (rad/s)
  double pulse_duration = 1e-7;   // square drive length (s)
  double sigma_a = 0.1;           // relative amplitude noise per bin
  double sigma_p = 0.1;           // phase noise per bin (rad)

  double gamma() const { return gamma_g + gamma_f; }
  double cooperativity() const;
  void validate() const;  // throws std::invalid_argument
};

/// Amplitudes of a time-bin qudit over N = 2^m bins.
struct QuditAmplitudes {
  CVector amps;

  std::size_t dim() const { return static_cast<std::size_t>(amps.size()); }
  int m() const;
  static QuditAmplitudes uniform(int m);
};

struct LambdaSample {
  double t;
  Complex c0, c1, c2;        // amplitudes of |g,0>, |e,0>, |f,1> (no-jump branch)
  double spontaneous_prob;   // gamma * int |c1|^2 dt up to t
  double cavity_prob;        // kappa * int |c2|^2 dt up to t
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrates the no-jump Schroedinger equation from (1, 0, 0) at t_grid[0]
/// with the drive switched off after pulse_duration. Throws IntegrationError
/// when the adaptive stepper cannot make progress.
std::vector<LambdaSample> solve_lambda_dynamics(const SourceParams& p,
                                                std::span<const double> t_grid);

/// Adiabatically eliminated c2(t) for a square pulse at zero two-photon
/// detuning, c0(0) = 1.
Complex closed_form_c2(const SourceParams& p, double t);

/// Output time-bin mode v(t) = sqrt(kappa) * c2(t) from input-output theory.
Complex closed_form_output_mode(const SourceParams& p, double t);

/// Exponent A of the ground-state depletion |c0|^2 = exp(2 A t).
double depletion_rate(const SourceParams& p);

struct SpontaneousEmission {
  double total;            // P_gamma
  double loss_share;       // (gamma_f / gamma) P_gamma: emitter trapped in |f>, no photon
  double dephasing_share;  // (gamma_g / gamma) P_gamma: reported diagnostic only
};

/// Long-pulse approximation of the spontaneous-emission probability. Only
/// meaningful once the drive has depleted |g>; throws std::domain_error if
/// exp(2 A T) > 0.01.
SpontaneousEmission spontaneous_emission_prob(const SourceParams& p);

/// amps[l] proportional to 1/sqrt(transmission[l]) so that the bins arrive
/// with equal weight. Throws std::invalid_argument on transmissions outside (0,1].
QuditAmplitudes precompensated_amplitudes(std::span<const double> branch_transmissions);

/// base[l] (1 + alpha_l) exp(i theta_l), alpha ~ N(0, sigma_a^2),
/// theta ~ N(0, sigma_p^2), renormalized to unit norm. Draws alpha_l then
/// theta_l for each bin in order.
QuditAmplitudes sample_noisy_qudit(int m, const QuditAmplitudes& base, const SourceParams& p,
                                   Rng& rng);

}  // namespace qn
