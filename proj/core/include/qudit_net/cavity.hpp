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

// Spin-photon phase gate by reflection off a single-sided cavity, and the
// binary-routed interaction of a time-bin photon with a spin register.

#pragma once

#include <span>
#include <vector>

#include "qudit_net/optics.hpp"
#include "qudit_net/qstate.hpp"

namespace qn {

struct GateParams {
  double delta0 = 0.0;   // detuning of the |0> transition from the cavity (rad/s)
  double delta1 = 0.0;   // detuning of the |1> transition from the cavity (rad/s)
  double g0 = 0.0;       // |0> coupling (rad/s)
  double g1 = 3.1622776601683795e10;  // |1> coupling, C1 = 100 with the rates below
  double gamma0 = 1e8;
  double gamma1 = 1e8;
  double kappa_a = 0.95e11;  // out-coupling to the line
  double kappa = 1e11;       // total cavity decay
  double omega = 0.0;        // photon detuning from the cavity

  double cooperativity0() const;
  double cooperativity1() const;
  void validate() const;

  /// Resonant parameters with the requested cooperativities and coupling ratio.
  static GateParams from_cooperativities(double c0, double c1, double kappa_a_over_kappa,
                                         double kappa = 1e11, double gamma = 1e8);
};

struct ReflectionPair {
  Complex r0;
  Complex r1;
};

/// Reflection amplitude of the cavity with the spin in |0> and in |1>.
ReflectionPair reflection_coefficients(const GateParams& p);

enum class Side { alice, bob };

/// Factor index of qubit i of a side in the protocol layout.
std::size_t spin_factor(const HilbertLayout& layout, Side side, int qubit);

/// Hadamard in the Z H convention, [[1, 1], [-1, 1]] / sqrt(2). It takes
/// |+> to |0> and -|-> to |1>, which makes the ideal gate sequence land on
/// |1_l> with a + sign.
const CMatrix& spin_readout_rotation();

/// In place: bins routed to the cavity pick up diag(r0, r1) on the spin.
void reflect(PureState& psi, std::size_t photon, std::size_t spin, const BinRouting& routing,
             const ReflectionPair& r);
/// Density-operator form: rho -> K rho K^dagger with the same K.
void reflect(CMatrix& rho, const HilbertLayout& layout, std::size_t photon, std::size_t spin,
             const BinRouting& routing, const ReflectionPair& r);

struct WeightedBranch {
  SwitchOutcome outcome;
  double weight;  // switch probability of this branch
  PureState state;
};

/// One switch + cavity pass for one spin. Returns the surviving (correct,
/// wrong) branches; the deficit of the weights from 1 is the switch loss.
/// Each state's branch_weight is the parent's times the branch weight.
std::vector<WeightedBranch> scatter_stage(const PureState& psi, std::size_t photon,
                                          std::size_t spin, const BinRouting& intended,
                                          const ReflectionPair& r, const SwitchParams& sw);

/// Full side interaction with every switch branch enumerated: stages for
/// qubits m-1 .. 0, then spin_readout_rotation on each spin of the side.
/// Branches with zero weight are dropped.
std::vector<PureState> register_interaction(const PureState& psi, Side side, int m,
                                            const ReflectionPair& r, const SwitchParams& sw);
std::vector<PureState> register_interaction(const PureState& psi, Side side, int m,
                                            const GateParams& gate, const SwitchParams& sw);

/// Same pipeline with the switch outcomes fixed in advance. `outcomes[i]`
/// is the switch result for qubit i and must not be `lost`.
void register_interaction_sampled(PureState& psi, Side side, int m, const ReflectionPair& r,
                                  std::span<const SwitchOutcome> outcomes);

}  // namespace qn
