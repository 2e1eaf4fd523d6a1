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

#include "qudit_net/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qn {

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

void require_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("channel time must be non-negative");
}

// Survival e^{-t/T}, with T = inf meaning no decay.
double survival(double t, double time_constant) {
  if (std::isinf(time_constant)) return 1.0;
  return std::exp(-t / time_constant);
}

}  // namespace

void ChannelParams::validate() const {
  if (!(t1 > 0.0)) throw std::invalid_argument("channel.t1_s must be positive");
  if (!(tp > 0.0)) throw std::invalid_argument("channel.tp_s must be positive");
  if (!(a_beta >= 0.0 && a_beta <= 1.0)) {
    throw std::invalid_argument("channel.a_beta must lie in [0, 1]");
  }
}

std::array<CMatrix, 2> dephasing_kraus(double t, double tp) {
  require_time(t);
  const double e = survival(t, tp);
  const double a0 = std::sqrt((1.0 + e) / 2.0);
  const double a1 = std::sqrt((1.0 - e) / 2.0);
  return {mat2(a0, 0, 0, a0), mat2(a1, 0, 0, -a1)};
}

std::array<CMatrix, 4> gad_kraus(double t, double t1, double a_beta) {
  require_time(t);
  if (!(a_beta >= 0.0 && a_beta <= 1.0)) throw std::invalid_argument("a_beta must lie in [0, 1]");
  const double keep = survival(t, t1);
  const double gamma = 1.0 - keep;
  const double sa = std::sqrt(a_beta);
  const double sb = std::sqrt(1.0 - a_beta);
  const double sk = std::sqrt(keep);
  const double sg = std::sqrt(gamma);
  return {mat2(sa, 0, 0, sa * sk), mat2(0, sa * sg, 0, 0), mat2(sb * sk, 0, 0, sb),
          mat2(0, 0, sb * sg, 0)};
}

std::vector<CMatrix> memory_kraus(double t, const ChannelParams& p) {
  const auto a = dephasing_kraus(t, p.tp);
  const auto e = gad_kraus(t, p.t1, p.a_beta);
  std::vector<CMatrix> out;
  out.reserve(a.size() * e.size());
  for (const CMatrix& ai : a) {
    for (const CMatrix& ej : e) out.push_back(ai * ej);
  }
  return out;
}

DensityOperator memory_channel(const DensityOperator& rho, std::size_t qubit, double t,
                               const ChannelParams& p) {
  p.validate();
  if (rho.layout().dim(qubit) != 2) throw std::invalid_argument("memory_channel: not a qubit");
  const auto kraus = memory_kraus(t, p);
  return apply_kraus(rho, kraus, qubit);
}

PairMemoryChannel::PairMemoryChannel(double t_a, double t_b, const ChannelParams& p) {
  p.validate();
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  // Qubit 0 is the more significant factor of the pair.
  for (const CMatrix& k : memory_kraus(t_a, p)) {
    Eigen::Matrix4cd big;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) big.block<2, 2>(2 * i, 2 * j) = k(i, j) * id;
    on_a_.push_back(big);
  }
  for (const CMatrix& k : memory_kraus(t_b, p)) {
    Eigen::Matrix4cd big = Eigen::Matrix4cd::Zero();
    big.block<2, 2>(0, 0) = k;
    big.block<2, 2>(2, 2) = k;
    on_b_.push_back(big);
  }
}

Eigen::Matrix4cd PairMemoryChannel::apply(const Eigen::Matrix4cd& rho) const {
  Eigen::Matrix4cd mid = Eigen::Matrix4cd::Zero();
  for (const auto& k : on_a_) mid.noalias() += k * rho * k.adjoint();
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (const auto& k : on_b_) out.noalias() += k * mid * k.adjoint();
  return out;
}

Eigen::Matrix4cd memory_channel_pair(const Eigen::Matrix4cd& rho, double t_a, double t_b,
                                     const ChannelParams& p) {
  return PairMemoryChannel(t_a, t_b, p).apply(rho);
}

double round_time(double length_km, double c_km_s) {
  if (!(c_km_s > 0.0) || length_km < 0.0) {
    throw std::invalid_argument("round_time: need L >= 0 and c > 0");
  }
  return 2.0 * length_km / c_km_s;
}

WaitTimes assign_wait_times(Strategy strategy, int m, const RoundsRecord* rounds,
                            double length_km, double c_km_s) {
  if (m < 1) throw std::invalid_argument("assign_wait_times: m must be positive");
  const double t_round = round_time(length_km, c_km_s);
  const double bob_base = length_km / c_km_s;
  WaitTimes w;
  w.alice.assign(static_cast<std::size_t>(m), t_round);
  w.bob.assign(static_cast<std::size_t>(m), bob_base);
  if (strategy != Strategy::qubit_all_keep) return w;

  if (rounds == nullptr || rounds->success_round.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("assign_wait_times: all-keep needs one success round per link");
  }
  const int last = *std::max_element(rounds->success_round.begin(), rounds->success_round.end());
  if (rounds->final_round != last) {
    throw std::invalid_argument("assign_wait_times: final round must equal the latest success");
  }
  for (std::size_t j = 0; j < w.alice.size(); ++j) {
    const int k = rounds->success_round[j];
    if (k < 1) throw std::invalid_argument("assign_wait_times: rounds are 1-based");
    const double extra = static_cast<double>(rounds->final_round - k) * t_round;
    w.alice[j] += extra;
    w.bob[j] += extra;
  }
  return w;
}

}  // namespace qn
