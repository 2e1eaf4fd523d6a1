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

// Spin-memory decoherence while qubits wait for heralding.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "qudit_net/qstate.hpp"

namespace qn {

struct ChannelParams {
  double t1 = 10e-3;    // amplitude damping time (s)
  double tp = 5e-3;     // pure dephasing time (s)
  double a_beta = 0.5;  // steady-state population of |0>

  void validate() const;
};

/// A0 = sqrt((1 + e^{-t/Tp})/2) I, A1 = sqrt((1 - e^{-t/Tp})/2) Z.
std::array<CMatrix, 2> dephasing_kraus(double t, double tp);

/// Generalized amplitude damping towards diag(a_beta, 1 - a_beta).
std::array<CMatrix, 4> gad_kraus(double t, double t1, double a_beta);

/// The eight products A_i E_j (damping first, then dephasing).
std::vector<CMatrix> memory_kraus(double t, const ChannelParams& p);

DensityOperator memory_channel(const DensityOperator& rho, std::size_t qubit, double t,
                               const ChannelParams& p);

/// Channel on each qubit of a two-qubit pair state, qubit 0 waiting t_a and
/// qubit 1 waiting t_b.
Eigen::Matrix4cd memory_channel_pair(const Eigen::Matrix4cd& rho, double t_a, double t_b,
                                     const ChannelParams& p);

/// memory_channel_pair with the Kraus operators built once, for repeated use
/// at fixed waiting times.
class PairMemoryChannel {
 public:
  PairMemoryChannel(double t_a, double t_b, const ChannelParams& p);
  Eigen::Matrix4cd apply(const Eigen::Matrix4cd& rho) const;

 private:
  std::vector<Eigen::Matrix4cd> on_a_;
  std::vector<Eigen::Matrix4cd> on_b_;
};

enum class Strategy { qudit, qubit_all_keep, qubit_one_shot };

struct WaitTimes {
  std::vector<double> alice;  // indexed by pair
  std::vector<double> bob;
};

/// Success round of each link (1-based) and the final round of the campaign.
struct RoundsRecord {
  std::vector<int> success_round;
  int final_round = 1;
};

/// Round duration, photon flight plus the heralding reply: 2 L / c.
double round_time(double length_km, double c_km_s);

/// Base waits 2L/c for Alice and L/c for Bob. For all-keep, a link done in
/// round k of K waits an extra (K - k) round times on both ends. `rounds` is
/// ignored for the other strategies. Throws std::invalid_argument on an
/// inconsistent record.
WaitTimes assign_wait_times(Strategy strategy, int m, const RoundsRecord* rounds,
                            double length_km, double c_km_s);

}  // namespace qn
