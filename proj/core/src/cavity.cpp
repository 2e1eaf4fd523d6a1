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

#include "qudit_net/cavity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qn {

namespace {

constexpr Complex kI{0.0, 1.0};

double cooperativity(double g, double kappa, double gamma) {
  if (g == 0.0) return 0.0;
  return g * g / (kappa * gamma);
}

// Emitter response C / (-(i/gamma)(omega + Delta) + 1/2); zero when uncoupled.
Complex emitter_term(double g, double gamma, double kappa, double omega, double delta) {
  if (g == 0.0) return Complex{};
  return cooperativity(g, kappa, gamma) / (-kI * (omega + delta) / gamma + 0.5);
}

Complex reflection(const GateParams& p, double g, double gamma, double delta) {
  const Complex denom = -kI * p.omega / p.kappa + 0.5 + emitter_term(g, gamma, p.kappa, p.omega, delta);
  return 1.0 - (p.kappa_a / p.kappa) / denom;
}

CMatrix reflection_op(const ReflectionPair& r) {
  CMatrix op = CMatrix::Zero(2, 2);
  op(0, 0) = r.r0;
  op(1, 1) = r.r1;
  return op;
}

void check_routing(const BinRouting& routing, const HilbertLayout& layout, std::size_t photon) {
  if (routing.to_cavity.size() != layout.dim(photon)) {
    throw std::invalid_argument("reflect: routing size does not match the photon dimension");
  }
}

std::vector<const CMatrix*> routed_ops(const BinRouting& routing, const CMatrix& op) {
  std::vector<const CMatrix*> ops(routing.to_cavity.size(), nullptr);
  for (std::size_t l = 0; l < ops.size(); ++l) {
    if (routing.to_cavity[l]) ops[l] = &op;
  }
  return ops;
}

void check_side_layout(const HilbertLayout& layout, int m) {
  if (layout.size() == 0 || layout.label(0) != kPhotonLabel ||
      layout.dim(0) != (std::size_t{1} << m)) {
    throw std::invalid_argument("register_interaction: state has no 2^m-bin photon factor");
  }
}

void finish_side(PureState& psi, Side side, int m) {
  for (int i = 0; i < m; ++i) {
    apply_local(psi, spin_readout_rotation(), spin_factor(psi.layout(), side, i));
  }
}

}  // namespace

double GateParams::cooperativity0() const { return cooperativity(g0, kappa, gamma0); }
double GateParams::cooperativity1() const { return cooperativity(g1, kappa, gamma1); }

void GateParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("GateParams: ") + what);
  };
  require(kappa > 0.0, "kappa must be positive");
  require(kappa_a >= 0.0 && kappa_a <= kappa, "kappa_a must lie in [0, kappa]");
  require(gamma0 >= 0.0 && gamma1 >= 0.0, "gamma0, gamma1 must be non-negative");
  require(g0 == 0.0 || gamma0 > 0.0, "g0 != 0 needs gamma0 > 0");
  require(g1 == 0.0 || gamma1 > 0.0, "g1 != 0 needs gamma1 > 0");
}

GateParams GateParams::from_cooperativities(double c0, double c1, double kappa_a_over_kappa,
                                            double kappa, double gamma) {
  if (c0 < 0.0 || c1 < 0.0) throw std::invalid_argument("cooperativities must be non-negative");
  GateParams p;
  p.kappa = kappa;
  p.kappa_a = kappa_a_over_kappa * kappa;
  p.gamma0 = gamma;
  p.gamma1 = gamma;
  p.g0 = std::sqrt(c0 * kappa * gamma);
  p.g1 = std::sqrt(c1 * kappa * gamma);
  p.validate();
  return p;
}

ReflectionPair reflection_coefficients(const GateParams& p) {
  p.validate();
  return ReflectionPair{reflection(p, p.g0, p.gamma0, p.delta0),
                        reflection(p, p.g1, p.gamma1, p.delta1)};
}

std::size_t spin_factor(const HilbertLayout& layout, Side side, int qubit) {
  return layout.index_of(side == Side::alice ? alice_label(qubit) : bob_label(qubit));
}

const CMatrix& spin_readout_rotation() {
  static const CMatrix op = [] {
    CMatrix h(2, 2);
    const double s = 1.0 / std::numbers::sqrt2;
    h << s, s, -s, s;
    return h;
  }();
  return op;
}

void reflect(PureState& psi, std::size_t photon, std::size_t spin, const BinRouting& routing,
             const ReflectionPair& r) {
  check_routing(routing, psi.layout(), photon);
  const CMatrix op = reflection_op(r);
  apply_controlled(psi, photon, routed_ops(routing, op), spin);
}

void reflect(CMatrix& rho, const HilbertLayout& layout, std::size_t photon, std::size_t spin,
             const BinRouting& routing, const ReflectionPair& r) {
  check_routing(routing, layout, photon);
  const CMatrix op = reflection_op(r);
  apply_controlled(rho, layout, photon, routed_ops(routing, op), spin);
}

std::vector<WeightedBranch> scatter_stage(const PureState& psi, std::size_t photon,
                                          std::size_t spin, const BinRouting& intended,
                                          const ReflectionPair& r, const SwitchParams& sw) {
  std::vector<WeightedBranch> out;
  for (const SwitchBranch& b : switch_channel(sw, intended)) {
    if (b.outcome == SwitchOutcome::lost || b.weight == 0.0) continue;
    PureState next = psi;
    next.set_branch_weight(psi.branch_weight() * b.weight);
    reflect(next, photon, spin, *b.routing, r);
    out.push_back(WeightedBranch{b.outcome, b.weight, std::move(next)});
  }
  return out;
}

std::vector<PureState> register_interaction(const PureState& psi, Side side, int m,
                                            const ReflectionPair& r, const SwitchParams& sw) {
  check_side_layout(psi.layout(), m);
  std::vector<PureState> branches{psi};
  for (int i = m - 1; i >= 0; --i) {
    const BinRouting routing = BinRouting::for_stage(m, i);
    std::vector<PureState> next;
    for (const PureState& b : branches) {
      for (WeightedBranch& w : scatter_stage(b, 0, spin_factor(b.layout(), side, i), routing, r, sw)) {
        next.push_back(std::move(w.state));
      }
    }
    branches = std::move(next);
  }
  for (PureState& b : branches) finish_side(b, side, m);
  return branches;
}

std::vector<PureState> register_interaction(const PureState& psi, Side side, int m,
                                            const GateParams& gate, const SwitchParams& sw) {
  return register_interaction(psi, side, m, reflection_coefficients(gate), sw);
}

void register_interaction_sampled(PureState& psi, Side side, int m, const ReflectionPair& r,
                                  std::span<const SwitchOutcome> outcomes) {
  check_side_layout(psi.layout(), m);
  if (outcomes.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("register_interaction_sampled: need one switch outcome per qubit");
  }
  for (int i = m - 1; i >= 0; --i) {
    const SwitchOutcome o = outcomes[static_cast<std::size_t>(i)];
    if (o == SwitchOutcome::lost) {
      throw std::invalid_argument("register_interaction_sampled: lost photons do not interact");
    }
    BinRouting routing = BinRouting::for_stage(m, i);
    if (o == SwitchOutcome::wrong) routing = routing.inverted();
    reflect(psi, 0, spin_factor(psi.layout(), side, i), routing, r);
  }
  finish_side(psi, side, m);
}

}  // namespace qn
