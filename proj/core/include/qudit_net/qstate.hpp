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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qn {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kPositivityTol = 1e-9;

/// Ordered list of subsystem dimensions with a unique label per factor.
///
/// The first factor is the most significant digit of the flat index, so a
/// basis state |i0 i1 ... in> lives at i0 * stride(0) + i1 * stride(1) + ...
class HilbertLayout {
 public:
  HilbertLayout() = default;
  HilbertLayout(std::vector<std::size_t> dims, std::vector<std::string> labels);

  static HilbertLayout qubits(std::vector<std::string> labels);

  /// [photon, A_{m-1}..A_0, B_{m-1}..B_0]; the photon factor is omitted for
  /// the post-measurement register layout.
  static HilbertLayout protocol(int m, bool with_photon = true);

  std::size_t size() const { return dims_.size(); }
  std::size_t dim(std::size_t factor) const { return dims_.at(factor); }
  const std::string& label(std::size_t factor) const { return labels_.at(factor); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t total_dim() const { return total_; }
  std::size_t stride(std::size_t factor) const;
  std::size_t index_of(std::string_view label) const;

  HilbertLayout concat(const HilbertLayout& other) const;
  HilbertLayout subset(std::span<const std::size_t> keep) const;

  bool operator==(const HilbertLayout&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::string> labels_;
  std::size_t total_ = 1;
};

std::string alice_label(int qubit);
std::string bob_label(int qubit);
inline constexpr std::string_view kPhotonLabel = "photon";

/// A (possibly sub-normalized) branch of a pure state.
///
/// The probability mass of the branch is branch_weight * |amplitudes|^2:
/// amplitudes carry amplitude-level loss, branch_weight carries the weight of
/// classically sampled or enumerated events that led here.
class PureState {
 public:
  PureState() = default;
  PureState(CVector amplitudes, HilbertLayout layout, double branch_weight = 1.0);

  static PureState basis(HilbertLayout layout, std::size_t index);

  const CVector& amplitudes() const { return amplitudes_; }
  CVector& amplitudes() { return amplitudes_; }
  const HilbertLayout& layout() const { return layout_; }
  double branch_weight() const { return branch_weight_; }
  void set_branch_weight(double w) { branch_weight_ = w; }
  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double mass() const { return branch_weight_ * norm_squared(); }

 private:
  CVector amplitudes_;
  HilbertLayout layout_;
  double branch_weight_ = 1.0;
};

class DensityOperator {
 public:
  DensityOperator() = default;
  /// Checks hermiticity and trace range; positivity is checked on demand by
  /// check_physical() because it needs an eigendecomposition.
  DensityOperator(CMatrix matrix, HilbertLayout layout);

  static DensityOperator from_pure(const PureState& psi);

  const CMatrix& matrix() const { return matrix_; }
  const HilbertLayout& layout() const { return layout_; }
  double trace() const { return matrix_.trace().real(); }
  double min_eigenvalue() const;
  /// Throws std::domain_error if not Hermitian, trace outside [0,1] or not PSD.
  void check_physical() const;

 private:
  CMatrix matrix_;
  HilbertLayout layout_;
};

PureState tensor(const PureState& a, const PureState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep);

/// Reduced density operator of the kept factors of a pure branch, scaled by
/// the branch mass.
DensityOperator reduced_density(const PureState& psi, std::span<const std::size_t> keep);

/// Sum_k K rho K^dagger on one factor. Throws std::invalid_argument if the
/// Kraus set is not complete to kAlgebraTol.
DensityOperator apply_kraus(const DensityOperator& rho, std::span<const CMatrix> kraus,
                            std::size_t target);

bool is_complete_kraus_set(std::span<const CMatrix> kraus, double tol = kAlgebraTol);

/// In-place op on one factor of a pure state (op need not be unitary).
void apply_local(PureState& psi, const CMatrix& op, std::size_t target);
/// In-place rho -> op rho op^dagger on one factor.
void apply_local(CMatrix& rho, const HilbertLayout& layout, const CMatrix& op,
                 std::size_t target);

/// Applies ops[c] to `target` on the subspace where `control` is in state c.
/// A null entry means identity on that subspace.
void apply_controlled(PureState& psi, std::size_t control, std::span<const CMatrix* const> ops,
                      std::size_t target);
void apply_controlled(CMatrix& rho, const HilbertLayout& layout, std::size_t control,
                      std::span<const CMatrix* const> ops, std::size_t target);

struct Projection {
  PureState state;     // normalized, branch_weight = probability
  double probability;  // |<v|psi>|^2 * branch_weight
};

/// Projects `subsystem` onto basis_vector; the projected factor is kept in the
/// layout. Throws std::domain_error on a zero-probability outcome.
Projection project(const PureState& psi, std::size_t subsystem, const CVector& basis_vector);

/// <Phi+|rho|Phi+> for a two-qubit operator.
double fidelity_to_bell(const DensityOperator& rho_pair);
double fidelity_to_bell(const Eigen::Matrix4cd& rho_pair);

}  // namespace qn
