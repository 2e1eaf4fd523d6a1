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

// Deterministic reference for small m: the qudit attempt evolved as a
// density operator with every switch branch enumerated and all Gaussian
// noise averaged in closed form or by quadrature.

#pragma once

#include <vector>

#include "qudit_net/protocol.hpp"

namespace qn {

inline constexpr int kMaxOracleM = 3;

struct OracleResult {
  double herald_probability = 0.0;
  std::vector<double> outcome_distribution;  // unnormalized, sums to herald_probability
  std::vector<Eigen::Matrix4cd> per_pair_rho;  // after the memory channel
  std::vector<double> per_pair_fidelity;
  double average_fidelity = 0.0;
  /// Heralded, phase-corrected register state before the memory channel.
  DensityOperator registers;
};

/// E[a a^dagger] for the normalized noisy qudit a_l = b_l (1 + alpha_l)
/// e^{i theta_l} / norm. Phases give e^{-sigma_p^2} on every coherence; the
/// amplitude average uses 1/S = int_0^inf e^{-sS} ds, which turns it into
/// a one-dimensional integral of per-bin Gaussian moments.
CMatrix source_moment_matrix(const QuditAmplitudes& base, double sigma_a, double sigma_p);

/// Exact single-attempt statistics of the qudit strategy. Throws
/// std::invalid_argument for m > kMaxOracleM or a qubit strategy, and
/// EstimationError when nothing can herald.
OracleResult exact_run(const ProtocolConfig& cfg);

/// E[max of m iid geometric(p)] = sum_{k >= 0} (1 - (1 - (1-p)^k)^m),
/// truncated once the remaining tail is below 1e-10 of the sum.
double expected_max_geometric(int m, double p);

}  // namespace qn
