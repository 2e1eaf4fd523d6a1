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

#include "qudit_net/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qn {

namespace {

// Applies `op` (d x d) to every length-d fiber of a strided buffer whose
// digit of interest has stride `digit_stride`. `elem_stride` is the distance
// between consecutive logical elements in memory (1 for a column of a
// column-major matrix, rows() for a row).
void apply_fibers(Complex* data, std::ptrdiff_t elem_stride, std::size_t total,
                  std::size_t d, std::size_t digit_stride, const CMatrix& op) {
  const std::size_t block = d * digit_stride;
  const std::size_t outer = total / block;
  if (d == 2) {
    const Complex a = op(0, 0), b = op(0, 1), c = op(1, 0), e = op(1, 1);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t lo = 0; lo < digit_stride; ++lo) {
        const std::size_t i0 = o * block + lo;
        Complex& x0 = data[static_cast<std::ptrdiff_t>(i0) * elem_stride];
        Complex& x1 = data[static_cast<std::ptrdiff_t>(i0 + digit_stride) * elem_stride];
        const Complex y0 = a * x0 + b * x1;
        const Complex y1 = c * x0 + e * x1;
        x0 = y0;
        x1 = y1;
      }
    }
    return;
  }
  CVector fiber(static_cast<Eigen::Index>(d));
  CVector out(static_cast<Eigen::Index>(d));
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t lo = 0; lo < digit_stride; ++lo) {
      const std::size_t base = o * block + lo;
      for (std::size_t k = 0; k < d; ++k) {
        fiber[static_cast<Eigen::Index>(k)] =
            data[static_cast<std::ptrdiff_t>(base + k * digit_stride) * elem_stride];
      }
      out.noalias() = op * fiber;
      for (std::size_t k = 0; k < d; ++k) {
        data[static_cast<std::ptrdiff_t>(base + k * digit_stride) * elem_stride] =
            out[static_cast<Eigen::Index>(k)];
      }
    }
  }
}

// Controlled variant: the op applied to a fiber depends on the digit of the
// control factor at the fiber's base index.
void apply_controlled_fibers(Complex* data, std::ptrdiff_t elem_stride, std::size_t total,
                             std::size_t d, std::size_t digit_stride, std::size_t control_dim,
                             std::size_t control_stride, std::span<const CMatrix* const> ops) {
  const std::size_t block = d * digit_stride;
  const std::size_t outer = total / block;
  if (d == 2) {
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t lo = 0; lo < digit_stride; ++lo) {
        const std::size_t i0 = o * block + lo;
        const CMatrix* op = ops[(i0 / control_stride) % control_dim];
        if (op == nullptr) continue;
        Complex& x0 = data[static_cast<std::ptrdiff_t>(i0) * elem_stride];
        Complex& x1 = data[static_cast<std::ptrdiff_t>(i0 + digit_stride) * elem_stride];
        const Complex y0 = (*op)(0, 0) * x0 + (*op)(0, 1) * x1;
        const Complex y1 = (*op)(1, 0) * x0 + (*op)(1, 1) * x1;
        x0 = y0;
        x1 = y1;
      }
    }
    return;
  }
  CVector fiber(static_cast<Eigen::Index>(d));
  CVector out(static_cast<Eigen::Index>(d));
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t lo = 0; lo < digit_stride; ++lo) {
      const std::size_t base = o * block + lo;
      const std::size_t c = (base / control_stride) % control_dim;
      const CMatrix* op = ops[c];
      if (op == nullptr) continue;
      for (std::size_t k = 0; k < d; ++k) {
        fiber[static_cast<Eigen::Index>(k)] =
            data[static_cast<std::ptrdiff_t>(base + k * digit_stride) * elem_stride];
      }
      out.noalias() = (*op) * fiber;
      for (std::size_t k = 0; k < d; ++k) {
        data[static_cast<std::ptrdiff_t>(base + k * digit_stride) * elem_stride] =
            out[static_cast<Eigen::Index>(k)];
      }
    }
  }
}

void require_square_op(const CMatrix& op, std::size_t d, const char* what) {
  if (static_cast<std::size_t>(op.rows()) != d || static_cast<std::size_t>(op.cols()) != d) {
    throw std::invalid_argument(std::string(what) + ": operator dimension does not match factor");
  }
}

// For each flat index: its index within the kept factors and within the rest.
struct SplitIndex {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> rest;
  std::size_t kept_dim = 1;
  std::size_t rest_dim = 1;
};

SplitIndex split_index(const HilbertLayout& layout, std::span<const std::size_t> keep) {
  std::vector<bool> is_kept(layout.size(), false);
  for (std::size_t k : keep) {
    if (k >= layout.size()) throw std::out_of_range("partial trace: invalid subsystem index");
    if (is_kept[k]) throw std::invalid_argument("partial trace: duplicate subsystem index");
    is_kept[k] = true;
  }
  SplitIndex s;
  for (std::size_t f = 0; f < layout.size(); ++f) {
    (is_kept[f] ? s.kept_dim : s.rest_dim) *= layout.dim(f);
  }
  const std::size_t total = layout.total_dim();
  s.kept.resize(total);
  s.rest.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    std::size_t kept = 0, rest = 0;
    // digits from most significant factor down
    std::size_t kept_mult = s.kept_dim, rest_mult = s.rest_dim;
    for (std::size_t f = 0; f < layout.size(); ++f) {
      const std::size_t st = layout.stride(f);
      const std::size_t digit = rem / st;
      rem %= st;
      if (is_kept[f]) {
        kept_mult /= layout.dim(f);
        kept += digit * kept_mult;
      } else {
        rest_mult /= layout.dim(f);
        rest += digit * rest_mult;
      }
    }
    s.kept[i] = kept;
    s.rest[i] = rest;
  }
  return s;
}

}  // namespace

HilbertLayout::HilbertLayout(std::vector<std::size_t> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.size() != labels_.size()) {
    throw std::invalid_argument("HilbertLayout: one label per factor required");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw std::invalid_argument("HilbertLayout: duplicate label " + l);
  }
  for (std::size_t d : dims_) {
    if (d == 0) throw std::invalid_argument("HilbertLayout: zero-dimensional factor");
    total_ *= d;
  }
}

HilbertLayout HilbertLayout::qubits(std::vector<std::string> labels) {
  std::vector<std::size_t> dims(labels.size(), 2);
  return HilbertLayout(std::move(dims), std::move(labels));
}

HilbertLayout HilbertLayout::protocol(int m, bool with_photon) {
  if (m < 1 || m > 10) throw std::invalid_argument("HilbertLayout::protocol: m out of range");
  std::vector<std::size_t> dims;
  std::vector<std::string> labels;
  if (with_photon) {
    dims.push_back(std::size_t{1} << m);
    labels.emplace_back(kPhotonLabel);
  }
  for (int i = m - 1; i >= 0; --i) {
    dims.push_back(2);
    labels.push_back(alice_label(i));
  }
  for (int i = m - 1; i >= 0; --i) {
    dims.push_back(2);
    labels.push_back(bob_label(i));
  }
  return HilbertLayout(std::move(dims), std::move(labels));
}

std::size_t HilbertLayout::stride(std::size_t factor) const {
  if (factor >= dims_.size()) throw std::out_of_range("HilbertLayout::stride");
  std::size_t s = 1;
  for (std::size_t f = factor + 1; f < dims_.size(); ++f) s *= dims_[f];
  return s;
}

std::size_t HilbertLayout::index_of(std::string_view label) const {
  for (std::size_t f = 0; f < labels_.size(); ++f) {
    if (labels_[f] == label) return f;
  }
  throw std::out_of_range("HilbertLayout: no factor labelled " + std::string(label));
}

HilbertLayout HilbertLayout::concat(const HilbertLayout& other) const {
  std::vector<std::size_t> dims = dims_;
  std::vector<std::string> labels = labels_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  return HilbertLayout(std::move(dims), std::move(labels));
}

HilbertLayout HilbertLayout::subset(std::span<const std::size_t> keep) const {
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> dims;
  std::vector<std::string> labels;
  for (std::size_t f : sorted) {
    dims.push_back(dim(f));
    labels.push_back(label(f));
  }
  return HilbertLayout(std::move(dims), std::move(labels));
}

std::string alice_label(int qubit) { return "A" + std::to_string(qubit); }
std::string bob_label(int qubit) { return "B" + std::to_string(qubit); }

PureState::PureState(CVector amplitudes, HilbertLayout layout, double branch_weight)
    : amplitudes_(std::move(amplitudes)), layout_(std::move(layout)), branch_weight_(branch_weight) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
    throw std::invalid_argument("PureState: amplitude count does not match layout");
  }
  if (!(branch_weight_ >= 0.0 && branch_weight_ <= 1.0 + kAlgebraTol)) {
    throw std::invalid_argument("PureState: branch weight outside [0,1]");
  }
}

PureState PureState::basis(HilbertLayout layout, std::size_t index) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return PureState(std::move(v), std::move(layout));
}

DensityOperator::DensityOperator(CMatrix matrix, HilbertLayout layout)
    : matrix_(std::move(matrix)), layout_(std::move(layout)) {
  const auto n = static_cast<std::size_t>(matrix_.rows());
  if (matrix_.rows() != matrix_.cols() || n != layout_.total_dim()) {
    throw std::invalid_argument("DensityOperator: matrix shape does not match layout");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
    throw std::domain_error("DensityOperator: matrix is not Hermitian");
  }
  const double tr = trace();
  if (tr < -kAlgebraTol || tr > 1.0 + kAlgebraTol) {
    throw std::domain_error("DensityOperator: trace outside [0,1]");
  }
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  CMatrix rho = psi.branch_weight() * (psi.amplitudes() * psi.amplitudes().adjoint());
  return DensityOperator(std::move(rho), psi.layout());
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityOperator::check_physical() const {
  if (min_eigenvalue() < -kPositivityTol) {
    throw std::domain_error("DensityOperator: matrix is not positive semidefinite");
  }
}

PureState tensor(const PureState& a, const PureState& b) {
  CVector v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return PureState(std::move(v), a.layout().concat(b.layout()),
                   a.branch_weight() * b.branch_weight());
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  CMatrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return DensityOperator(std::move(m), a.layout().concat(b.layout()));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("partial trace: keep set is empty");
  const SplitIndex s = split_index(rho.layout(), keep);
  // Group flat indices by their traced-out digits.
  std::vector<std::vector<std::size_t>> groups(s.rest_dim, std::vector<std::size_t>(s.kept_dim));
  for (std::size_t i = 0; i < s.kept.size(); ++i) groups[s.rest[i]][s.kept[i]] = i;
  const auto kd = static_cast<Eigen::Index>(s.kept_dim);
  CMatrix out = CMatrix::Zero(kd, kd);
  const CMatrix& m = rho.matrix();
  for (const auto& g : groups) {
    for (Eigen::Index c = 0; c < kd; ++c) {
      const auto col = static_cast<Eigen::Index>(g[static_cast<std::size_t>(c)]);
      for (Eigen::Index r = 0; r < kd; ++r) {
        out(r, c) += m(static_cast<Eigen::Index>(g[static_cast<std::size_t>(r)]), col);
      }
    }
  }
  return DensityOperator(std::move(out), rho.layout().subset(keep));
}

DensityOperator reduced_density(const PureState& psi, std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("reduced density: keep set is empty");
  const SplitIndex s = split_index(psi.layout(), keep);
  CMatrix amps(static_cast<Eigen::Index>(s.kept_dim), static_cast<Eigen::Index>(s.rest_dim));
  for (std::size_t i = 0; i < s.kept.size(); ++i) {
    amps(static_cast<Eigen::Index>(s.kept[i]), static_cast<Eigen::Index>(s.rest[i])) =
        psi.amplitudes()[static_cast<Eigen::Index>(i)];
  }
  CMatrix rho = psi.branch_weight() * (amps * amps.adjoint());
  return DensityOperator(std::move(rho), psi.layout().subset(keep));
}

bool is_complete_kraus_set(std::span<const CMatrix> kraus, double tol) {
  if (kraus.empty()) return false;
  const auto d = kraus.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) return false;
    sum += k.adjoint() * k;
  }
  return (sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

DensityOperator apply_kraus(const DensityOperator& rho, std::span<const CMatrix> kraus,
                            std::size_t target) {
  if (target >= rho.layout().size()) throw std::out_of_range("apply_kraus: invalid target");
  if (!is_complete_kraus_set(kraus)) {
    throw std::invalid_argument("apply_kraus: Kraus set is not complete");
  }
  const auto n = rho.matrix().rows();
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& k : kraus) {
    CMatrix term = rho.matrix();
    apply_local(term, rho.layout(), k, target);
    out += term;
  }
  // Clean rounding-level anti-Hermitian residue before re-validation.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(std::move(out), rho.layout());
}

void apply_local(PureState& psi, const CMatrix& op, std::size_t target) {
  const auto& layout = psi.layout();
  require_square_op(op, layout.dim(target), "apply_local");
  apply_fibers(psi.amplitudes().data(), 1, layout.total_dim(), layout.dim(target),
               layout.stride(target), op);
}

void apply_local(CMatrix& rho, const HilbertLayout& layout, const CMatrix& op,
                 std::size_t target) {
  require_square_op(op, layout.dim(target), "apply_local");
  const std::size_t n = layout.total_dim();
  const std::size_t d = layout.dim(target), st = layout.stride(target);
  for (Eigen::Index c = 0; c < rho.cols(); ++c) apply_fibers(rho.col(c).data(), 1, n, d, st, op);
  const CMatrix conj_op = op.conjugate();
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    apply_fibers(rho.data() + r, rho.rows(), n, d, st, conj_op);
  }
}

void apply_controlled(PureState& psi, std::size_t control, std::span<const CMatrix* const> ops,
                      std::size_t target) {
  const auto& layout = psi.layout();
  if (control == target) throw std::invalid_argument("apply_controlled: control equals target");
  if (ops.size() != layout.dim(control)) {
    throw std::invalid_argument("apply_controlled: need one op slot per control value");
  }
  for (const CMatrix* op : ops) {
    if (op != nullptr) require_square_op(*op, layout.dim(target), "apply_controlled");
  }
  apply_controlled_fibers(psi.amplitudes().data(), 1, layout.total_dim(), layout.dim(target),
                          layout.stride(target), layout.dim(control), layout.stride(control), ops);
}

void apply_controlled(CMatrix& rho, const HilbertLayout& layout, std::size_t control,
                      std::span<const CMatrix* const> ops, std::size_t target) {
  if (control == target) throw std::invalid_argument("apply_controlled: control equals target");
  if (ops.size() != layout.dim(control)) {
    throw std::invalid_argument("apply_controlled: need one op slot per control value");
  }
  std::vector<CMatrix> conj_storage;
  std::vector<const CMatrix*> conj_ops(ops.size(), nullptr);
  conj_storage.reserve(ops.size());
  for (std::size_t c = 0; c < ops.size(); ++c) {
    if (ops[c] == nullptr) continue;
    require_square_op(*ops[c], layout.dim(target), "apply_controlled");
    conj_storage.push_back(ops[c]->conjugate());
    conj_ops[c] = &conj_storage.back();
  }
  const std::size_t n = layout.total_dim();
  const std::size_t d = layout.dim(target), st = layout.stride(target);
  const std::size_t cd = layout.dim(control), cs = layout.stride(control);
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    apply_controlled_fibers(rho.col(c).data(), 1, n, d, st, cd, cs, ops);
  }
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    apply_controlled_fibers(rho.data() + r, rho.rows(), n, d, st, cd, cs, conj_ops);
  }
}

Projection project(const PureState& psi, std::size_t subsystem, const CVector& basis_vector) {
  const auto& layout = psi.layout();
  if (subsystem >= layout.size()) throw std::out_of_range("project: invalid subsystem");
  const std::size_t d = layout.dim(subsystem);
  if (static_cast<std::size_t>(basis_vector.size()) != d) {
    throw std::invalid_argument("project: basis vector dimension mismatch");
  }
  if (std::abs(basis_vector.squaredNorm() - 1.0) > kAlgebraTol) {
    throw std::invalid_argument("project: basis vector is not normalized");
  }
  const CMatrix projector = basis_vector * basis_vector.adjoint();
  PureState out = psi;
  apply_local(out, projector, subsystem);
  const double norm2 = out.norm_squared();
  const double probability = norm2 * psi.branch_weight();
  if (!(probability > 1e-14 * std::max(psi.mass(), 1e-300))) {
    throw std::domain_error("project: outcome has zero probability");
  }
  out.amplitudes() /= std::sqrt(norm2);
  out.set_branch_weight(std::min(probability, 1.0));
  return Projection{std::move(out), probability};
}

double fidelity_to_bell(const Eigen::Matrix4cd& rho) {
  const double f = 0.5 * (rho(0, 0) + rho(0, 3) + rho(3, 0) + rho(3, 3)).real();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity_to_bell(const DensityOperator& rho_pair) {
  if (rho_pair.matrix().rows() != 4) {
    throw std::invalid_argument("fidelity_to_bell: expected a 4x4 two-qubit operator");
  }
  return fidelity_to_bell(Eigen::Matrix4cd(rho_pair.matrix()));
}

}  // namespace qn
