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

#include "qudit_net/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qn {

namespace {

void require_unit_interval(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(field) + " must lie in [0, 1], got " +
                                std::to_string(v));
  }
}

std::size_t photon_dim(const PureState& psi) {
  if (psi.layout().size() == 0 || psi.layout().label(0) != kPhotonLabel) {
    throw std::invalid_argument("photon must be the first factor of the state");
  }
  return psi.layout().dim(0);
}

int log2_exact(std::size_t n) {
  int m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  if ((std::size_t{1} << m) != n) throw std::invalid_argument("photon dimension is not 2^m");
  return m;
}

// Column k holds <X_k|psi> restricted to the remaining factors.
CMatrix fourier_blocks(const PureState& psi) {
  const std::size_t n = photon_dim(psi);
  const auto rest = static_cast<Eigen::Index>(psi.layout().total_dim() / n);
  Eigen::Map<const CMatrix> blocks(psi.amplitudes().data(), rest, static_cast<Eigen::Index>(n));
  return blocks * qft_matrix(log2_exact(n)).conjugate();
}

std::vector<std::size_t> non_photon_factors(const HilbertLayout& layout) {
  std::vector<std::size_t> keep;
  for (std::size_t f = 1; f < layout.size(); ++f) keep.push_back(f);
  return keep;
}

}  // namespace

void SwitchParams::validate() const {
  require_unit_interval(eta_sw, "switch.eta");
  require_unit_interval(e_sw, "switch.error");
}

BinRouting BinRouting::for_stage(int m, int bit) {
  if (bit < 0 || bit >= m) throw std::out_of_range("BinRouting::for_stage: bit out of range");
  BinRouting r;
  r.to_cavity.resize(std::size_t{1} << m);
  for (std::size_t l = 0; l < r.to_cavity.size(); ++l) r.to_cavity[l] = ((l >> bit) & 1U) != 0;
  return r;
}

BinRouting BinRouting::inverted() const {
  BinRouting r = *this;
  r.to_cavity.flip();
  return r;
}

std::array<SwitchBranch, 3> switch_channel(const SwitchParams& p, const BinRouting& intended) {
  p.validate();
  return {SwitchBranch{SwitchOutcome::correct, p.eta_sw * (1.0 - p.e_sw), intended},
          SwitchBranch{SwitchOutcome::wrong, p.eta_sw * p.e_sw, intended.inverted()},
          SwitchBranch{SwitchOutcome::lost, 1.0 - p.eta_sw, std::nullopt}};
}

SwitchOutcome sample_switch(const SwitchParams& p, Rng& rng) {
  const double u = uniform01(rng);
  if (u < p.eta_sw * (1.0 - p.e_sw)) return SwitchOutcome::correct;
  if (u < p.eta_sw) return SwitchOutcome::wrong;
  return SwitchOutcome::lost;
}

double fiber_transmission(double length_km, double attenuation_km) {
  if (length_km < 0.0 || !(attenuation_km > 0.0)) {
    throw std::invalid_argument("fiber_transmission: need L >= 0 and L_att > 0");
  }
  return std::exp(-length_km / attenuation_km);
}

int DetectionParams::loops_for_bin(int bin, int m) const {
  const int n = 1 << m;
  if (bin < 0 || bin >= n) throw std::out_of_range("loops_for_bin: bin out of range");
  return n - 1 - bin;
}

void DetectionParams::validate() const {
  require_unit_interval(eta_lag, "detection.eta_lag");
  require_unit_interval(detector_efficiency, "detection.efficiency");
  if (!(sigma_x_per_level >= 0.0)) {
    throw std::invalid_argument("detection.sigma_x_per_m must be non-negative");
  }
}

double loop_transmission(int bin, int m, const DetectionParams& det) {
  return std::pow(1.0 - det.eta_lag, det.loops_for_bin(bin, m));
}

double detection_transmission_per_bin(int bin, int m, const SwitchParams& sw,
                                      const DetectionParams& det) {
  return std::pow(sw.eta_sw * (1.0 - sw.e_sw), m) * loop_transmission(bin, m, det);
}

std::string_view to_string(LossCause cause) {
  switch (cause) {
    case LossCause::none: return "none";
    case LossCause::fiber: return "fiber";
    case LossCause::switch_loss: return "switch";
    case LossCause::cavity: return "cavity";
    case LossCause::loop: return "loop";
    case LossCause::detector: return "detector";
    case LossCause::wrong_switch_timing: return "wrong_switch_timing";
  }
  return "unknown";
}

void interferometer_dephase_exact(CMatrix& rho, const HilbertLayout& layout, std::size_t photon,
                                  double sigma_x) {
  if (sigma_x == 0.0) return;
  const double decay = std::exp(-0.5 * sigma_x * sigma_x);
  const std::size_t stride = layout.stride(photon);
  const std::size_t n = layout.dim(photon);
  const auto dim = rho.rows();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::size_t bj = (static_cast<std::size_t>(j) / stride) % n;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if ((static_cast<std::size_t>(i) / stride) % n != bj) rho(i, j) *= decay;
    }
  }
}

DensityOperator interferometer_dephase_exact(const DensityOperator& rho, std::size_t photon,
                                             double sigma_x) {
  CMatrix m = rho.matrix();
  interferometer_dephase_exact(m, rho.layout(), photon, sigma_x);
  return DensityOperator(std::move(m), rho.layout());
}

void interferometer_dephase_sampled(PureState& psi, std::size_t photon, double sigma_x, Rng& rng) {
  if (sigma_x == 0.0) return;
  const std::size_t n = psi.layout().dim(photon);
  const std::size_t stride = psi.layout().stride(photon);
  const double width = sigma_x / std::numbers::sqrt2;
  std::vector<Complex> phase(n);
  for (auto& ph : phase) ph = std::polar(1.0, gaussian(rng, width));
  CVector& a = psi.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a[i] *= phase[(static_cast<std::size_t>(i) / stride) % n];
  }
}

CMatrix qft_matrix(int m) {
  if (m < 0 || m > 20) throw std::out_of_range("qft_matrix: m out of range");
  const auto n = Eigen::Index{1} << m;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  CMatrix f(n, n);
  // w^{kl} = exp(2 pi i kl / N); reduce kl mod N first to keep the angle exact.
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * l) % n) /
                           static_cast<double>(n);
      f(l, k) = std::polar(norm, angle);
    }
  }
  return f;
}

CVector qft_basis_vector(int m, int k) {
  const int n = 1 << m;
  if (k < 0 || k >= n) throw std::out_of_range("qft_basis_vector: k out of range");
  return qft_matrix(m).col(k);
}

std::vector<double> qft_outcome_probabilities(const PureState& psi) {
  const CMatrix c = fourier_blocks(psi);
  std::vector<double> p(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index k = 0; k < c.cols(); ++k) {
    p[static_cast<std::size_t>(k)] = psi.branch_weight() * c.col(k).squaredNorm();
  }
  return p;
}

PureState project_photon_onto(const PureState& psi, int k) {
  const CMatrix c = fourier_blocks(psi);
  if (k < 0 || k >= c.cols()) throw std::out_of_range("project_photon_onto: k out of range");
  const auto keep = non_photon_factors(psi.layout());
  return PureState(c.col(k), psi.layout().subset(keep), psi.branch_weight());
}

QftResult qft_measure(const PureState& psi, double u, LossCause no_click_cause) {
  const CMatrix c = fourier_blocks(psi);
  double cumulative = 0.0;
  for (Eigen::Index k = 0; k < c.cols(); ++k) {
    const double pk = psi.branch_weight() * c.col(k).squaredNorm();
    cumulative += pk;
    if (u < cumulative && pk > 0.0) {
      const auto keep = non_photon_factors(psi.layout());
      CVector amps = c.col(k) / std::sqrt(c.col(k).squaredNorm());
      QftResult r;
      r.outcome = MeasurementOutcome{true, static_cast<int>(k), LossCause::none};
      r.remainder = PureState(std::move(amps), psi.layout().subset(keep), pk);
      return r;
    }
  }
  return QftResult{MeasurementOutcome{false, -1, no_click_cause}, std::nullopt};
}

QftResult qft_measure(const PureState& psi, Rng& rng, LossCause no_click_cause) {
  return qft_measure(psi, uniform01(rng), no_click_cause);
}

}  // namespace qn
