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

#include <cmath>
#include <random>

#include "qudit_net/qstate.hpp"
#include "qudit_net/rng.hpp"

namespace qn::testing {

inline CVector random_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g;
  CVector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = Complex{g(rng), g(rng)};
  return v.normalized();
}

/// Random full-rank density matrix G G^dagger / tr.
inline CMatrix random_density(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex{g(rng), g(rng)};
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

/// Kronecker product written out by index, independent of the library.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline Eigen::Matrix4cd bell_projector() {
  Eigen::Vector4cd phi(1.0, 0.0, 0.0, 1.0);
  phi /= std::sqrt(2.0);
  return phi * phi.adjoint();
}

}  // namespace qn::testing
