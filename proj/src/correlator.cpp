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

#include "pdguard/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "pdguard/error.hpp"
#include "pdguard/observables.hpp"

namespace pdguard {
namespace {

constexpr double kLagTolerance = 1e-9;

bool contains_lag(std::span<const double> lags, double lag) {
  return std::any_of(lags.begin(), lags.end(), [&](double l) { return std::abs(l - lag) <= kLagTolerance; });
}

// |R(tau) + sqrt(eta) e^{j dtheta} R(tau - dtau)|^2 with the authentic amplitude normalized to one.
double composite_magnitude2(const InterferenceParams& theta, double tau) {
  const std::complex<double> v =
      autocorr(tau) + std::sqrt(theta.eta) * std::polar(1.0, theta.delta_theta) * autocorr(tau - theta.delta_tau);
  return std::norm(v);
}

}  // namespace

std::vector<double> uniform_taps(int n_taps, double half_span) {
  if (n_taps < 3 || n_taps % 2 == 0) throw ConfigError("tap count must be odd and >= 3");
  std::vector<double> taps(static_cast<std::size_t>(n_taps));
  const int half = n_taps / 2;
  for (int i = 0; i < n_taps; ++i) {
    taps[static_cast<std::size_t>(i)] = half_span * static_cast<double>(i - half) / half;
  }
  return taps;
}

void ChannelConfig::validate() const {
  if (!(tau_d > 0.0 && tau_d < 1.0)) throw ConfigError("tau_d must lie in (0, 1) chips");
  if (!(tau_dll > 0.0 && tau_dll < 1.0)) throw ConfigError("tau_dll must lie in (0, 1) chips");
  if (!(accum_t > 0.0)) throw ConfigError("accum_t must be > 0");
  if (!(w_p > 0.0)) throw ConfigError("w_p must be > 0");
  if (m_s < 0) throw ConfigError("m_s must be >= 0");
  if (!(tau_c > 0.0)) throw ConfigError("tau_c must be > 0");
  if (!(sigma_p_db >= 0.0)) throw ConfigError("sigma_p must be >= 0");
  if (!std::isfinite(p_a_dbw) || !std::isfinite(n0_dbw_hz)) throw ConfigError("p_a and n0 must be finite");
  if (tap_grid.size() < 3) throw ConfigError("tap grid needs at least three lags");
  for (std::size_t i = 1; i < tap_grid.size(); ++i) {
    if (!(tap_grid[i] > tap_grid[i - 1])) throw ConfigError("tap grid must be strictly increasing");
  }
  if (tap_grid.front() > -1.0 + kLagTolerance || tap_grid.back() < 1.0 - kLagTolerance) {
    throw ConfigError("tap grid must span [-1, +1] chips");
  }
  if (!contains_lag(tap_grid, 0.0) || !contains_lag(tap_grid, tau_d) || !contains_lag(tap_grid, -tau_d)) {
    throw ConfigError("tap grid must include 0 and +/- tau_d");
  }
}

std::size_t CorrelationSnapshot::tap_index(double lag) const {
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (std::abs(lags[i] - lag) <= kLagTolerance) return i;
  }
  throw ConfigError("snapshot has no tap at lag " + std::to_string(lag));
}

double autocorr(double tau) { return std::max(0.0, 1.0 - std::abs(tau)); }

double noise_sigma(double n0_dbw_hz, double m0_w_hz, double accum_t) {
  if (!(accum_t > 0.0)) throw ConfigError("accumulation interval must be > 0");
  if (m0_w_hz < 0.0) throw ConfigError("multi-access density must be >= 0");
  return std::sqrt((db_to_linear(n0_dbw_hz) + m0_w_hz) / (2.0 * accum_t));
}

double multi_access_density(int m_s, double p_bar_m, double tau_c) {
  if (m_s < 0 || p_bar_m < 0.0 || tau_c < 0.0) throw ConfigError("multi-access inputs must be >= 0");
  return (2.0 / 3.0) * m_s * p_bar_m * tau_c;
}

MultiAccessPower pbar_m_for_case(PowerCase power_case, double p_a, const InterferenceParams& theta) {
  if (!(p_a > 0.0)) throw ConfigError("p_a must be > 0");
  switch (power_case) {
    case PowerCase::kCleanOrSingleTarget:
      return {p_a, false};
    case PowerCase::kNoncoherentEnsemble:
      return {(1.0 + theta.eta) * p_a, false};
    case PowerCase::kCoherentEnsemble: {
      const double raw = (1.0 + theta.eta) * p_a +
                         2.0 * std::sqrt(theta.eta) * p_a * std::cos(theta.delta_theta) * autocorr(theta.delta_tau);
      if (raw < 0.0) return {0.0, true};
      return {raw, false};
    }
  }
  throw ConfigError("unknown power case");
}

double agc_gain(double p_current, double p_h0) {
  if (!(p_current > 0.0) || !(p_h0 > 0.0)) throw ConfigError("AGC powers must be > 0");
  return std::sqrt(p_h0 / p_current);
}

double estimate_code_phase(const InterferenceParams& theta, double grid_step) {
  if (!(grid_step > 0.0) || grid_step > 0.01) throw ConfigError("code-phase grid step must be in (0, 0.01]");
  if (theta.eta == 0.0) return 0.0;

  const double lo = std::min(0.0, theta.delta_tau) - 2.0;
  const double hi = std::max(0.0, theta.delta_tau) + 2.0;
  const auto n_steps = static_cast<long>(std::ceil((hi - lo) / grid_step));

  double best_tau = 0.0;
  double best = -1.0;
  auto consider = [&](double tau) {
    const double m = composite_magnitude2(theta, tau);
    const double tol = 1e-12 * std::max(best, m);
    if (m > best + tol) {
      best = m;
      best_tau = tau;
    } else if (m >= best - tol) {
      const double a = std::abs(tau);
      const double b = std::abs(best_tau);
      if (a < b || (a == b && tau < best_tau)) best_tau = tau;
      best = std::max(best, m);
    }
  };

  // Vertices first so that exact values win ties against nearby grid points.
  for (double v : {0.0, theta.delta_tau, -1.0, 1.0, theta.delta_tau - 1.0, theta.delta_tau + 1.0}) {
    if (v >= lo && v <= hi) consider(v);
  }
  for (long k = 0; k <= n_steps; ++k) consider(std::min(hi, lo + static_cast<double>(k) * grid_step));
  return best_tau;
}

Eigen::MatrixXd noise_covariance(std::span<const double> lags, double sigma_n) {
  const auto n = static_cast<Eigen::Index>(lags.size());
  Eigen::MatrixXd cov(n, n);
  const double var = sigma_n * sigma_n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cov(i, j) = var * autocorr(lags[static_cast<std::size_t>(i)] - lags[static_cast<std::size_t>(j)]);
    }
  }
  return cov;
}

SnapshotModel::SnapshotModel(const ChannelConfig& cfg, std::vector<double> lags)
    : cfg_(cfg), lags_(lags.empty() ? cfg.tap_grid : std::move(lags)), p_h0_(clean_power_watts(cfg)) {
  cfg_.validate();
  const Eigen::MatrixXd cov = noise_covariance(lags_, 1.0);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    const auto n = cov.rows();
    llt.compute(cov + 1e-12 * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success) throw ConfigError("tap noise covariance is not positive definite");
  }
  unit_chol_ = llt.matrixL();
}

double SnapshotModel::beta(const InterferenceParams& theta, PowerCase power_case) const {
  return agc_gain(case_mean_power(cfg_, power_case, theta), p_h0_);
}

double SnapshotModel::sigma_n(const InterferenceParams& theta, PowerCase power_case) const {
  const auto pbar = pbar_m_for_case(power_case, cfg_.p_a_watts(), theta);
  return noise_sigma(cfg_.n0_dbw_hz, multi_access_density(cfg_.m_s, pbar.watts, cfg_.tau_c), cfg_.accum_t);
}

CorrelationSnapshot SnapshotModel::sample(const InterferenceParams& theta, PowerCase power_case, double tau_hat,
                                          Rng& rng, bool with_noise) const {
  CorrelationSnapshot snap;
  snap.lags = lags_;
  snap.beta_k = beta(theta, power_case);
  snap.sigma_n = sigma_n(theta, power_case);

  const double amp_a = std::sqrt(cfg_.p_a_watts());
  const std::complex<double> amp_i = std::sqrt(theta.eta) * amp_a * std::polar(1.0, theta.delta_theta);
  const double offset_i = theta.delta_tau - tau_hat;

  const auto n = static_cast<Eigen::Index>(lags_.size());
  Eigen::VectorXd noise_re = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd noise_im = Eigen::VectorXd::Zero(n);
  if (with_noise) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = standard_normal(rng);
    noise_re = snap.sigma_n * (unit_chol_ * z);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = standard_normal(rng);
    noise_im = snap.sigma_n * (unit_chol_ * z);
  }

  snap.values.resize(lags_.size());
  for (std::size_t i = 0; i < lags_.size(); ++i) {
    const double lag = lags_[i];
    const auto k = static_cast<Eigen::Index>(i);
    const std::complex<double> clean = amp_a * autocorr(lag + tau_hat) + amp_i * autocorr(lag - offset_i);
    snap.values[i] = snap.beta_k * (clean + std::complex<double>(noise_re(k), noise_im(k)));
  }
  return snap;
}

CorrelationSnapshot composite_snapshot(const InterferenceParams& theta, const ChannelConfig& cfg,
                                       PowerCase power_case, Rng& rng, bool with_noise) {
  return SnapshotModel(cfg).sample(theta, power_case, rng, with_noise);
}

}  // namespace pdguard
