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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qudit_net/source.hpp"

namespace qn {
namespace {

std::vector<double> grid(double t0, double t1, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
  return t;
}

// Bad-cavity, weak-drive regime in dimensionless units: C = 1.
SourceParams adiabatic_params() {
  SourceParams p;
  p.drive = {0.1, 0.0};
  p.coupling = {10.0, 0.0};
  p.kappa = 100.0;
  p.gamma_g = 0.5;
  p.gamma_f = 0.5;
  p.detuning = 0.0;
  p.pulse_duration = 1500.0;
  return p;
}

TEST(Lambda, NoDriveStaysInGround) {
  SourceParams p;
  p.drive = {0.0, 0.0};
  const auto t = grid(0.0, 3e-7, 31);
  for (const auto& s : solve_lambda_dynamics(p, t)) {
    EXPECT_NEAR(std::abs(s.c0 - Complex{1.0, 0.0}), 0.0, 1e-14);
    EXPECT_EQ(s.c1, Complex{});
    EXPECT_EQ(s.c2, Complex{});
  }
}

TEST(Lambda, DampedRabiWithoutCavity) {
  SourceParams p;
  p.drive = {1e6, 0.0};
  p.coupling = {0.0, 0.0};
  p.gamma_g = 5e5;
  p.gamma_f = 5e5;
  p.kappa = 1e8;
  p.pulse_duration = 1e-4;
  const double om = 1e6, g = p.gamma();
  const double nu = std::sqrt(om * om - g * g / 16.0);
  const auto t = grid(0.0, 1e-5, 201);
  const auto out = solve_lambda_dynamics(p, t);
  ASSERT_EQ(out.size(), t.size());
  for (const auto& s : out) {
    const double expect = om / nu * std::exp(-g * s.t / 4.0) * std::abs(std::sin(nu * s.t));
    EXPECT_NEAR(std::abs(s.c1), expect, 1e-6) << "t = " << s.t;
  }
}

TEST(Lambda, NormNeverIncreases) {
  const SourceParams p;
  const auto t = grid(0.0, 3e-7, 301);
  double prev = 1.0 + 1e-12;
  for (const auto& s : solve_lambda_dynamics(p, t)) {
    const double n = std::norm(s.c0) + std::norm(s.c1) + std::norm(s.c2);
    EXPECT_LE(n, prev + 1e-10);
    // What left the no-jump branch went into a decay channel.
    EXPECT_NEAR(n + s.spontaneous_prob + s.cavity_prob, 1.0, 1e-7);
    prev = n;
  }
}

TEST(Lambda, RejectsDecreasingGrid) {
  const std::vector<double> t{0.0, 2.0, 1.0};
  EXPECT_THROW(solve_lambda_dynamics(SourceParams{}, t), std::invalid_argument);
}

TEST(ClosedForm, MatchesOdeInAdiabaticRegime) {
  const SourceParams p = adiabatic_params();
  // The eliminated amplitudes follow the drive after a few 1/(gamma (1+4C)).
  const double settle = 10.0;
  const auto t = grid(0.0, p.pulse_duration + 5.0, 400);
  double peak = 0.0;
  for (double ti : t) peak = std::max(peak, std::abs(closed_form_c2(p, ti)));
  for (const auto& s : solve_lambda_dynamics(p, t)) {
    if (s.t < settle) continue;
    EXPECT_LT(std::abs(s.c2 - closed_form_c2(p, s.t)) / peak, 0.01) << "t = " << s.t;
  }
}

TEST(ClosedForm, OutputModeDecaysAtPurcellRate) {
  const SourceParams p;
  const double t1 = p.pulse_duration + 1e-9, t2 = p.pulse_duration + 3e-9;
  const double ratio = std::abs(closed_form_output_mode(p, t2) / closed_form_output_mode(p, t1));
  EXPECT_NEAR(ratio, std::exp(-p.gamma() * (1.0 + 4.0 * p.cooperativity()) * (t2 - t1) / 2.0),
              1e-12);
  EXPECT_LT(std::abs(closed_form_output_mode(p, p.pulse_duration + 1e-5)), 1e-30);
}

TEST(ClosedForm, DrivePhaseRotatesMode) {
  SourceParams p;
  SourceParams q = p;
  const double phi = 0.7;
  q.drive = p.drive * std::polar(1.0, phi);
  for (double t : {1e-9, 5e-8, 1.2e-7}) {
    const Complex a = closed_form_output_mode(p, t), b = closed_form_output_mode(q, t);
    EXPECT_NEAR(std::abs(b - a * std::polar(1.0, phi)), 0.0, 1e-12 * std::abs(a));
  }
}

TEST(SpontaneousEmission, LongPulseLimitMatchesOde) {
  const SourceParams p = adiabatic_params();
  const double limit = 1.0 / (1.0 + 4.0 * p.cooperativity());
  EXPECT_NEAR(spontaneous_emission_prob(p).total, limit, 0.01 * limit);
  const std::vector<double> t{0.0, p.pulse_duration + 20.0};
  const auto out = solve_lambda_dynamics(p, t);
  EXPECT_NEAR(out.back().spontaneous_prob, limit, 0.01 * limit);
}

TEST(SpontaneousEmission, VanishesForLargeCooperativity) {
  SourceParams p = adiabatic_params();
  p.coupling = {1000.0, 0.0};
  p.drive = {1.0, 0.0};
  p.pulse_duration = 1e6;
  EXPECT_LT(spontaneous_emission_prob(p).total, 1e-4);
}

TEST(SpontaneousEmission, ShortPulseRejected) {
  SourceParams p = adiabatic_params();
  p.pulse_duration = 0.0;
  EXPECT_THROW(spontaneous_emission_prob(p), std::domain_error);
  p.pulse_duration = 10.0;
  EXPECT_THROW(spontaneous_emission_prob(p), std::domain_error);
}

TEST(SpontaneousEmission, BranchingShares) {
  SourceParams p = adiabatic_params();
  p.gamma_g = 1.0;
  p.gamma_f = 0.0;
  const auto s = spontaneous_emission_prob(p);
  EXPECT_EQ(s.loss_share, 0.0);
  EXPECT_DOUBLE_EQ(s.dephasing_share, s.total);
}

TEST(Precompensation, EqualTransmissionsGiveUniform) {
  const std::vector<double> t(8, 0.3);
  for (auto a : precompensated_amplitudes(t).amps) EXPECT_NEAR(a.real(), 1.0 / std::sqrt(8.0), 1e-15);
}

TEST(Precompensation, TwoBinHandValue) {
  const std::vector<double> t{1.0, 0.25};
  const auto a = precompensated_amplitudes(t).amps;
  EXPECT_NEAR(a[0].real(), 1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(a[1].real(), 2.0 / std::sqrt(5.0), 1e-15);
}

TEST(Precompensation, RoundTripIsUniformAndLossiestBinIsLargest) {
  const double eta0 = 0.86;
  std::vector<double> t;
  for (int l = 0; l < 4; ++l) t.push_back(std::pow(eta0, std::popcount(static_cast<unsigned>(l))));
  const auto a = precompensated_amplitudes(t).amps;
  CVector after = a;
  for (int l = 0; l < 4; ++l) after[l] *= std::sqrt(t[static_cast<std::size_t>(l)]);
  after.normalize();
  for (auto x : after) EXPECT_NEAR(std::abs(x - 0.5), 0.0, 1e-12);
  Eigen::Index best = 0;
  a.cwiseAbs().maxCoeff(&best);
  EXPECT_EQ(best, 3);
}

TEST(Precompensation, RejectsZeroTransmission) {
  const std::vector<double> t{1.0, 0.0};
  EXPECT_THROW(precompensated_amplitudes(t), std::invalid_argument);
}

TEST(NoisyQudit, NoNoiseReturnsBase) {
  SourceParams p;
  p.sigma_a = p.sigma_p = 0.0;
  Rng rng(1);
  const auto base = QuditAmplitudes::uniform(3);
  EXPECT_EQ(sample_noisy_qudit(3, base, p, rng).amps, base.amps);
}

TEST(NoisyQudit, AlwaysUnitNorm) {
  const SourceParams p;
  Rng rng(2);
  const auto base = QuditAmplitudes::uniform(4);
  for (int i = 0; i < 1000; ++i) EXPECT_NEAR(sample_noisy_qudit(4, base, p, rng).amps.norm(), 1.0, 1e-12);
}

TEST(NoisyQudit, PhaseNoiseOverlapMatchesScalarMonteCarlo) {
  SourceParams p;
  p.sigma_a = 0.0;
  p.sigma_p = 0.1;
  const int m = 2, n = 100000;
  const auto base = QuditAmplitudes::uniform(m);
  Rng rng(99);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double o = std::norm(base.amps.dot(sample_noisy_qudit(m, base, p, rng).amps));
    sum += o;
    sum2 += o * o;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);

  // Scalar oracle: |(1/4) sum_l e^{i theta_l}|^2 with its own generator.
  std::mt19937 g(12345);
  std::normal_distribution<double> theta(0.0, 0.1);
  double ref = 0.0;
  for (int i = 0; i < n; ++i) {
    Complex s{};
    for (int l = 0; l < 4; ++l) s += std::polar(0.25, theta(g));
    ref += std::norm(s);
  }
  ref /= n;
  EXPECT_NEAR(mean, ref, 3.0 * std::sqrt(2.0) * se);
  EXPECT_NEAR(mean, 0.25 + 0.75 * std::exp(-0.01), 3.0 * se);
}

}  // namespace
}  // namespace qn
