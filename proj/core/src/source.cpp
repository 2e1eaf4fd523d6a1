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

#include "qudit_net/source.hpp"

#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace qn {

namespace {

constexpr Complex kI{0.0, 1.0};

// Real layout: re/im of c0, c1, c2, then the two accumulated decay integrals.
using OdeState = std::array<double, 8>;

struct LambdaSystem {
  const SourceParams& p;
  bool driven;

  void operator()(const OdeState& x, OdeState& dxdt, double /*t*/) const {
    const Complex c0{x[0], x[1]}, c1{x[2], x[3]}, c2{x[4], x[5]};
    const Complex omega = driven ? p.drive : Complex{};
    const double gamma = p.gamma();
    const Complex d0 = -kI * (std::conj(omega) * c1);
    const Complex d1 =
        -kI * (omega * c0 + Complex{p.detuning, -0.5 * gamma} * c1 + p.coupling * c2);
    const Complex d2 =
        -kI * (std::conj(p.coupling) * c1 + Complex{p.raman_detuning, -0.5 * p.kappa} * c2);
    dxdt = {d0.real(), d0.imag(), d1.real(), d1.imag(), d2.real(), d2.imag(),
            gamma * std::norm(c1), p.kappa * std::norm(c2)};
  }
};

LambdaSample to_sample(double t, const OdeState& x) {
  return LambdaSample{t, {x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]}, x[6], x[7]};
}

struct Adiabatic {
  Complex prefactor;  // c2 amplitude per unit c0
  Complex b;          // c0(t) = exp(b t)
  Complex free_decay; // c2 ~ exp(-i (Delta - i Gamma/2) t) after the pulse
};

Adiabatic adiabatic_coefficients(const SourceParams& p) {
  const double purcell = p.gamma() * (1.0 + 4.0 * p.cooperativity());
  const Complex shifted{p.detuning, 0.5 * purcell};
  const double denom = p.detuning * p.detuning + 0.25 * purcell * purcell;
  Adiabatic a;
  a.prefactor = 2.0 * kI * p.drive * std::conj(p.coupling) * shifted / (p.kappa * denom);
  a.b = kI * std::norm(p.drive) * shifted / denom;
  a.free_decay = -kI * Complex{p.detuning, -0.5 * purcell};
  return a;
}

}  // namespace

double SourceParams::cooperativity() const {
  if (kappa <= 0.0 || gamma() <= 0.0) return 0.0;
  return std::norm(coupling) / (kappa * gamma());
}

void SourceParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SourceParams: ") + what);
  };
  require(gamma_g >= 0.0 && gamma_f >= 0.0, "decay rates must be non-negative");
  require(kappa >= 0.0, "cavity decay must be non-negative");
  require(pulse_duration >= 0.0, "pulse duration must be non-negative");
  require(sigma_a >= 0.0 && sigma_p >= 0.0, "noise widths must be non-negative");
}

int QuditAmplitudes::m() const {
  int m = 0;
  while ((std::size_t{1} << m) < dim()) ++m;
  return m;
}

QuditAmplitudes QuditAmplitudes::uniform(int m) {
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << m);
  return QuditAmplitudes{CVector::Constant(n, Complex{1.0 / std::sqrt(static_cast<double>(n)), 0.0})};
}

std::vector<LambdaSample> solve_lambda_dynamics(const SourceParams& p,
                                                std::span<const double> t_grid) {
  namespace odeint = boost::numeric::odeint;
  p.validate();
  std::vector<LambdaSample> out;
  if (t_grid.empty()) return out;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("solve_lambda_dynamics: time grid must be increasing");
    }
  }
  out.reserve(t_grid.size());

  OdeState x{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const double edge = p.pulse_duration;
  const double rate = std::max({std::abs(p.drive), std::abs(p.coupling), p.kappa, p.gamma(),
                                std::abs(p.detuning), 1.0});

  // One fresh stepper per segment: dopri5 caches the last derivative, which
  // must not leak across the drive edge.
  auto run = [&](const std::vector<double>& times, bool driven, bool skip_first, bool skip_last) {
    if (times.size() == 1) {
      if (!skip_first) out.push_back(to_sample(times.front(), x));
      return;
    }
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(1e-12, 1e-9);
    std::size_t seen = 0;
    auto observer = [&](const OdeState& s, double t) {
      const std::size_t idx = seen++;
      if ((idx == 0 && skip_first) || (idx + 1 == times.size() && skip_last)) return;
      out.push_back(to_sample(t, s));
    };
    try {
      odeint::integrate_times(stepper, LambdaSystem{p, driven}, x, times.begin(), times.end(),
                              0.01 / rate, observer, odeint::max_step_checker(2'000'000));
    } catch (const odeint::step_adjustment_error& e) {
      throw IntegrationError(std::string("solve_lambda_dynamics: ") + e.what());
    } catch (const odeint::no_progress_error& e) {
      throw IntegrationError(std::string("solve_lambda_dynamics: ") + e.what());
    }
  };

  std::vector<double> driven_pts, free_pts;
  for (double t : t_grid) (t <= edge ? driven_pts : free_pts).push_back(t);

  if (!driven_pts.empty()) {
    std::vector<double> seg = driven_pts;
    const bool synthetic_edge = !free_pts.empty() && seg.back() < edge;
    if (synthetic_edge) seg.push_back(edge);
    run(seg, true, false, synthetic_edge);
  }
  if (!free_pts.empty()) {
    std::vector<double> seg;
    if (!driven_pts.empty()) seg.push_back(edge);
    seg.insert(seg.end(), free_pts.begin(), free_pts.end());
    run(seg, false, !driven_pts.empty(), false);
  }
  return out;
}

Complex closed_form_c2(const SourceParams& p, double t) {
  const Adiabatic a = adiabatic_coefficients(p);
  if (t <= p.pulse_duration) return a.prefactor * std::exp(a.b * t);
  return a.prefactor * std::exp(a.b * p.pulse_duration) *
         std::exp(a.free_decay * (t - p.pulse_duration));
}

Complex closed_form_output_mode(const SourceParams& p, double t) {
  return std::sqrt(p.kappa) * closed_form_c2(p, t);
}

double depletion_rate(const SourceParams& p) {
  const double purcell = p.gamma() * (1.0 + 4.0 * p.cooperativity());
  return -std::norm(p.drive) * purcell /
         (2.0 * (p.detuning * p.detuning + 0.25 * purcell * purcell));
}

SpontaneousEmission spontaneous_emission_prob(const SourceParams& p) {
  const double remaining = std::exp(2.0 * depletion_rate(p) * p.pulse_duration);
  if (remaining > 0.01) {
    throw std::domain_error(
        "spontaneous_emission_prob: pulse too short, ground state not depleted (exp(2AT) > 0.01)");
  }
  const double c4 = 4.0 * p.cooperativity();
  const double total = 1.0 - (c4 / (1.0 + c4)) * (1.0 - remaining);
  const double gamma = p.gamma();
  const double loss = gamma > 0.0 ? p.gamma_f / gamma : 0.0;
  return SpontaneousEmission{total, loss * total, (1.0 - loss) * total};
}

QuditAmplitudes precompensated_amplitudes(std::span<const double> branch_transmissions) {
  if (branch_transmissions.empty()) {
    throw std::invalid_argument("precompensated_amplitudes: no bins");
  }
  CVector amps(static_cast<Eigen::Index>(branch_transmissions.size()));
  for (std::size_t l = 0; l < branch_transmissions.size(); ++l) {
    const double t = branch_transmissions[l];
    if (!(t > 0.0 && t <= 1.0)) {
      throw std::invalid_argument("precompensated_amplitudes: transmission outside (0,1]");
    }
    amps[static_cast<Eigen::Index>(l)] = 1.0 / std::sqrt(t);
  }
  amps.normalize();
  return QuditAmplitudes{std::move(amps)};
}

QuditAmplitudes sample_noisy_qudit(int m, const QuditAmplitudes& base, const SourceParams& p,
                                   Rng& rng) {
  if (base.dim() != (std::size_t{1} << m)) {
    throw std::invalid_argument("sample_noisy_qudit: base has wrong dimension");
  }
  if (p.sigma_a == 0.0 && p.sigma_p == 0.0) return base;
  CVector amps = base.amps;
  for (Eigen::Index l = 0; l < amps.size(); ++l) {
    const double alpha = gaussian(rng, p.sigma_a);
    const double theta = gaussian(rng, p.sigma_p);
    amps[l] *= (1.0 + alpha) * std::polar(1.0, theta);
  }
  const double norm = amps.norm();
  if (norm > 0.0) amps /= norm;
  return QuditAmplitudes{std::move(amps)};
}

}  // namespace qn
