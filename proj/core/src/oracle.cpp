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

#include "qudit_net/oracle.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <unsupported/Eigen/KroneckerProduct>

namespace qn {

namespace {

// Gaussian X ~ N(1, s2) reweighted by e^{-c X^2}: normalization, mean, variance.
struct Tilted {
  double weight, mean, var;
};

Tilted tilt(double c, double s2) {
  const double d = 1.0 + 2.0 * c * s2;
  return Tilted{std::exp(-c / d) / std::sqrt(d), 1.0 / d, s2 / d};
}

// E[X_l X_l' / S] with S = sum_j w_j X_j^2.
double amplitude_moment(const std::vector<double>& w, double s2, std::size_t l, std::size_t lp) {
  auto integrand = [&](double s) {
    double value = 1.0;
    for (std::size_t j = 0; j < w.size(); ++j) value *= tilt(s * w[j], s2).weight;
    const Tilted a = tilt(s * w[l], s2);
    if (l == lp) return value * (a.var + a.mean * a.mean);
    return value * a.mean * tilt(s * w[lp], s2).mean;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
}

}  // namespace

CMatrix source_moment_matrix(const QuditAmplitudes& base, double sigma_a, double sigma_p) {
  const auto n = static_cast<Eigen::Index>(base.dim());
  const CVector& b = base.amps;
  CMatrix out = b * b.adjoint() / b.squaredNorm();
  if (sigma_a > 0.0) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] = std::norm(b[j]);
    const double s2 = sigma_a * sigma_a;
    for (Eigen::Index l = 0; l < n; ++l) {
      for (Eigen::Index lp = l; lp < n; ++lp) {
        if (b[l] == 0.0 || b[lp] == 0.0) {
          out(l, lp) = out(lp, l) = 0.0;
          continue;
        }
        const double mom = amplitude_moment(w, s2, static_cast<std::size_t>(l),
                                            static_cast<std::size_t>(lp));
        out(l, lp) = b[l] * std::conj(b[lp]) * mom;
        out(lp, l) = std::conj(out(l, lp));
      }
    }
  }
  const double phase = std::exp(-sigma_p * sigma_p);
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index lp = 0; lp < n; ++lp) {
      if (l != lp) out(l, lp) *= phase;
    }
  }
  return out;
}

OracleResult exact_run(const ProtocolConfig& cfg) {
  cfg.validate();
  if (cfg.m > kMaxOracleM) {
    throw std::invalid_argument("oracle supports m <= " + std::to_string(kMaxOracleM) +
                                ", got " + std::to_string(cfg.m));
  }
  if (cfg.strategy != Strategy::qudit) {
    throw std::invalid_argument("oracle models a single qudit attempt; strategy must be qudit");
  }
  const AttemptPipeline pipe(cfg);
  const int m = pipe.m;
  const HilbertLayout& layout = pipe.layout;
  const std::size_t reg_dim = pipe.register_layout.total_dim();

  const CMatrix photon = source_moment_matrix(pipe.base, cfg.source.sigma_a, cfg.source.sigma_p);
  const CVector plus = CVector::Constant(static_cast<Eigen::Index>(reg_dim),
                                         1.0 / static_cast<double>(std::size_t{1} << m));
  CMatrix rho = Eigen::kroneckerProduct(photon, CMatrix(plus * plus.adjoint())).eval();

  for (Side side : {Side::alice, Side::bob}) {
    for (int i = m - 1; i >= 0; --i) {
      const std::size_t spin = spin_factor(layout, side, i);
      CMatrix mixed = CMatrix::Zero(rho.rows(), rho.cols());
      for (const SwitchBranch& b : switch_channel(cfg.sw, BinRouting::for_stage(m, i))) {
        if (b.outcome == SwitchOutcome::lost || b.weight == 0.0) continue;
        CMatrix branch = rho;
        reflect(branch, layout, 0, spin, *b.routing, pipe.r);
        mixed += b.weight * branch;
      }
      rho = std::move(mixed);
    }
    for (int i = 0; i < m; ++i) {
      apply_local(rho, layout, spin_readout_rotation(), spin_factor(layout, side, i));
    }
    if (side == Side::alice) rho *= pipe.fiber;
  }

  rho *= std::pow(cfg.sw.eta_sw * (1.0 - cfg.sw.e_sw), m) * pipe.detector_efficiency;
  CMatrix loops = CMatrix::Zero(static_cast<Eigen::Index>(pipe.bins), static_cast<Eigen::Index>(pipe.bins));
  for (std::size_t l = 0; l < pipe.bins; ++l) {
    loops(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) = pipe.loop_amplitude[l];
  }
  apply_local(rho, layout, loops, 0);
  interferometer_dephase_exact(rho, layout, 0, pipe.sigma_x);

  // <X_k| rho |X_k> block by block: sum_{l,l'} conj(F_lk) F_l'k rho_{l l'}.
  const CMatrix f = qft_matrix(m);
  const auto r = static_cast<Eigen::Index>(reg_dim);
  OracleResult out;
  CMatrix heralded = CMatrix::Zero(r, r);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(pipe.bins); ++k) {
    CMatrix block = CMatrix::Zero(r, r);
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(pipe.bins); ++l) {
      for (Eigen::Index lp = 0; lp < static_cast<Eigen::Index>(pipe.bins); ++lp) {
        block += std::conj(f(l, k)) * f(lp, k) * rho.block(l * r, lp * r, r, r);
      }
    }
    out.outcome_distribution.push_back(block.trace().real());
    const auto& fix = pipe.corrections[static_cast<std::size_t>(k)];
    for (int p = 0; p < m; ++p) {
      apply_local(block, pipe.register_layout, fix[static_cast<std::size_t>(p)],
                  pipe.register_layout.index_of(bob_label(p)));
    }
    heralded += block;
  }
  out.herald_probability = heralded.trace().real();
  if (!(out.herald_probability > 0.0)) {
    throw EstimationError("oracle: herald probability is zero");
  }
  heralded /= out.herald_probability;
  heralded = (0.5 * (heralded + heralded.adjoint())).eval();
  out.registers = DensityOperator(heralded, pipe.register_layout);

  const WaitTimes w =
      assign_wait_times(Strategy::qudit, m, nullptr, cfg.distance_km, cfg.c_fiber_km_s);
  double sum = 0.0;
  for (int p = 0; p < m; ++p) {
    const std::array<std::size_t, 2> keep{pipe.register_layout.index_of(alice_label(p)),
                                          pipe.register_layout.index_of(bob_label(p))};
    const Eigen::Matrix4cd pair = partial_trace(out.registers, keep).matrix();
    const Eigen::Matrix4cd aged = memory_channel_pair(pair, w.alice[static_cast<std::size_t>(p)],
                                                      w.bob[static_cast<std::size_t>(p)], cfg.channel);
    out.per_pair_rho.push_back(aged);
    out.per_pair_fidelity.push_back(fidelity_to_bell(aged));
    sum += out.per_pair_fidelity.back();
  }
  out.average_fidelity = sum / m;
  return out;
}

double expected_max_geometric(int m, double p) {
  if (m < 1) throw std::invalid_argument("expected_max_geometric: m must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("expected_max_geometric: p must lie in (0, 1]");
  if (p == 1.0) return 1.0;
  const double q = 1.0 - p;
  const double log_q = std::log1p(-p);
  double sum = 0.0;
  for (std::int64_t k = 0;; ++k) {
    // 1 - (1 - q^k)^m without cancellation.
    const double qk = std::exp(static_cast<double>(k) * log_q);
    const double term = k == 0 ? 1.0 : -std::expm1(m * std::log1p(-qk));
    sum += term;
    // 1 - (1 - x)^m <= m x, so the tail after k is at most m q^{k+1} / p.
    if (k > 0 && m * qk * q / p < 1e-10 * sum) break;
  }
  return sum;
}

}  // namespace qn
