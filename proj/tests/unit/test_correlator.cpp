// Copyright 2026 The pdguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "pdguard/correlator.hpp"
#include "pdguard/error.hpp"
#include "pdguard/observables.hpp"
#include "ks.hpp"

namespace pdguard {
namespace {

TEST(Autocorr, TriangleWithUnitPeakAndOneChipSupport) {
  EXPECT_DOUBLE_EQ(autocorr(0.0), 1.0);
  EXPECT_DOUBLE_EQ(autocorr(0.25), 0.75);
  EXPECT_DOUBLE_EQ(autocorr(-0.25), 0.75);
  EXPECT_DOUBLE_EQ(autocorr(1.0), 0.0);
  EXPECT_DOUBLE_EQ(autocorr(1.7), 0.0);
}

TEST(UniformTaps, FortyOneTapsSpanOneChipEachSide) {
  const auto taps = uniform_taps(41);
  ASSERT_EQ(taps.size(), 41u);
  EXPECT_DOUBLE_EQ(taps.front(), -1.0);
  EXPECT_DOUBLE_EQ(taps.back(), 1.0);
  EXPECT_DOUBLE_EQ(taps[20], 0.0);
  EXPECT_NEAR(taps[23], 0.15, 1e-12);
  EXPECT_THROW(uniform_taps(40), ConfigError);
}

// Frozen from an independent evaluation of sqrt((N0 + M0) / 2T).
TEST(NoiseSigma, ThermalOnly) {
  EXPECT_NEAR(noise_sigma(-204.0, 0.0, 0.1), 1.410863513160466e-10, 1e-22);
}

TEST(NoiseSigma, RejectsBadInterval) { EXPECT_THROW(noise_sigma(-204.0, 0.0, 0.0), ConfigError); }

TEST(MultiAccess, DensityAtDefaults) {
  const ChannelConfig cfg;
  EXPECT_NEAR(multi_access_density(cfg.m_s, cfg.p_a_watts(), cfg.tau_c) / 1.1458388605069542e-21, 1.0, 1e-12);
  EXPECT_NEAR(multi_access_density(7, 2.512e-16, 977.5e-9) / 1.1458906666666667e-21, 1.0, 1e-12);
}

// (1 + eta) - 2 sqrt(eta) = (1 - sqrt(eta))^2, so the coherent sum only
// touches zero at eta = 1 in antiphase.
TEST(MultiAccess, CoherentCaseNeverNegative) {
  const double p_a = 1.0;
  const auto theta = make_interference(4.0, 0.0, std::acos(-1.0));
  const auto m = pbar_m_for_case(PowerCase::kCoherentEnsemble, p_a, theta);
  EXPECT_FALSE(m.clamped);
  EXPECT_NEAR(m.watts, 1.0, 1e-12);
  const auto null = pbar_m_for_case(PowerCase::kCoherentEnsemble, p_a, make_interference(1.0, 0.0, std::acos(-1.0)));
  EXPECT_GE(null.watts, 0.0);
  EXPECT_NEAR(null.watts, 0.0, 1e-12);
  const auto nc = pbar_m_for_case(PowerCase::kNoncoherentEnsemble, p_a, theta);
  EXPECT_FALSE(nc.clamped);
  EXPECT_DOUBLE_EQ(nc.watts, 5.0);
  EXPECT_DOUBLE_EQ(pbar_m_for_case(PowerCase::kCleanOrSingleTarget, p_a, theta).watts, 1.0);
}

TEST(Agc, UnityAtSetpoint) {
  EXPECT_DOUBLE_EQ(agc_gain(2.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(agc_gain(4.0, 1.0), 0.5);
  EXPECT_THROW(agc_gain(0.0, 1.0), ConfigError);
}

TEST(NoiseCovariance, PositiveSemidefiniteOnDefaultGrid) {
  const auto taps = uniform_taps(41);
  const auto cov = noise_covariance(taps, 2.0);
  EXPECT_DOUBLE_EQ(cov(3, 3), 4.0);
  EXPECT_TRUE(cov.isApprox(cov.transpose()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-12);
}

TEST(CodePhase, CleanAndWeakInterferenceTrackAuthentic) {
  EXPECT_EQ(estimate_code_phase({}), 0.0);
  EXPECT_EQ(estimate_code_phase(make_interference(0.5, 0.4, 0.3)), 0.0);
  EXPECT_EQ(estimate_code_phase(make_interference(0.01, 1.5, 2.0)), 0.0);
}

TEST(CodePhase, StrongInterferenceCapturesTracking) {
  EXPECT_NEAR(estimate_code_phase(make_interference(1.5, 0.7, 0.0)), 0.7, 1e-12);
  EXPECT_NEAR(estimate_code_phase(make_interference(6.0, -3.0, 1.0)), -3.0, 1e-12);
}

// The estimate maximizes the noiseless composite magnitude.
TEST(CodePhase, PropertyNoBetterPointOnFineGrid) {
  Rng rng = make_stream(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto theta = make_interference(std::exp(3.0 * (uniform01(rng) - 0.5)), 4.0 * uniform01(rng) - 2.0,
                                         kTwoPi * uniform01(rng));
    const double tau_hat = estimate_code_phase(theta);
    auto mag = [&](double tau) {
      const std::complex<double> a = autocorr(tau);
      const std::complex<double> i = std::sqrt(theta.eta) * std::polar(1.0, theta.delta_theta) *
                                     autocorr(tau - theta.delta_tau);
      return std::abs(a + i);
    };
    const double best = mag(tau_hat);
    for (double tau = -4.0; tau <= 4.0; tau += 0.001) ASSERT_LE(mag(tau), best * (1.0 + 1e-9)) << tau;
  }
}

TEST(SnapshotModel, NoiselessDistortionMatchesFrozenValue) {
  const ChannelConfig cfg;
  const SnapshotModel model(cfg, {-0.15, 0.0, 0.15});
  const auto theta = make_interference(1.0, 0.5, 0.0);
  Rng rng = make_stream(1);
  const auto snap = model.sample(theta, PowerCase::kCoherentEnsemble, 0.0, rng, false);
  EXPECT_NEAR(snap.beta_k, 0.8442368395779768, 1e-12);
  EXPECT_NEAR(symmetric_difference(snap, 0.15, reference_sigma_n0(cfg)), 25.071059123798246, 1e-9);
  const auto single = model.sample(theta, PowerCase::kCleanOrSingleTarget, 0.0, rng, false);
  EXPECT_NEAR(symmetric_difference(single, 0.15, reference_sigma_n0(cfg)), 28.97577410307569, 1e-9);
}

TEST(SnapshotModel, CleanPromptEqualsAuthenticAmplitude) {
  const ChannelConfig cfg;
  const SnapshotModel model(cfg);
  Rng rng = make_stream(1);
  const auto snap = model.sample({}, PowerCase::kCleanOrSingleTarget, rng, false);
  EXPECT_DOUBLE_EQ(snap.beta_k, 1.0);
  EXPECT_NEAR(snap.values[snap.tap_index(0.0)].real(), std::sqrt(cfg.p_a_watts()), 1e-20);
  EXPECT_NEAR(snap.values[snap.tap_index(0.5)].real(), 0.5 * std::sqrt(cfg.p_a_watts()), 1e-20);
  EXPECT_EQ(snap.values[snap.tap_index(-1.0)], std::complex<double>(0.0, 0.0));
}

TEST(SnapshotModel, NoiseHasTriangleCovarianceAcrossTaps) {
  ChannelConfig cfg;
  const SnapshotModel model(cfg, {-0.15, 0.0, 0.15});
  Rng rng = make_stream(3);
  const int n = 100000;
  double s00 = 0.0;
  double s02 = 0.0;
  double s01 = 0.0;
  const double mean0 = model.sample({}, PowerCase::kCleanOrSingleTarget, 0.0, rng, false).values[0].real();
  const double mean1 = model.sample({}, PowerCase::kCleanOrSingleTarget, 0.0, rng, false).values[1].real();
  for (int i = 0; i < n; ++i) {
    const auto s = model.sample({}, PowerCase::kCleanOrSingleTarget, 0.0, rng);
    const double a = s.values[0].real() - mean0;
    const double b = s.values[1].real() - mean1;
    const double c = s.values[2].real() - mean0;
    s00 += a * a;
    s01 += a * b;
    s02 += a * c;
  }
  const double var = s00 / n;
  EXPECT_NEAR(var / (model.sigma_n({}, PowerCase::kCleanOrSingleTarget) * model.sigma_n({}, PowerCase::kCleanOrSingleTarget)), 1.0, 0.02);
  EXPECT_NEAR(s01 / n / var, 0.85, 0.01);
  EXPECT_NEAR(s02 / n / var, 0.70, 0.01);
}

TEST(SnapshotModel, SameStreamSameSnapshot) {
  const SnapshotModel model(ChannelConfig{});
  const auto theta = make_interference(0.2, 0.3, 1.0);
  Rng a = make_stream(11, 2, 3);
  Rng b = make_stream(11, 2, 3);
  EXPECT_EQ(model.sample(theta, PowerCase::kCleanOrSingleTarget, a).values,
            model.sample(theta, PowerCase::kCleanOrSingleTarget, b).values);
}

TEST(ChannelConfig, ValidationCatchesMissingTaps) {
  ChannelConfig cfg;
  cfg.tau_d = 0.17;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.tap_grid = uniform_taps(21, 0.5);
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace pdguard
