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

#pragma once

// Post-correlation model of the complex accumulation at a set of code lags:
// authentic and interference triangles, tap-correlated thermal plus
// multi-access noise, and the AGC gain that holds total power constant.
//
// Units: lags and code offsets in chips, powers in watts, densities in W/Hz.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pdguard/random.hpp"
#include "pdguard/types.hpp"

namespace pdguard {

/// Lags uniformly spanning [-half_span, +half_span] chips.
std::vector<double> uniform_taps(int n_taps, double half_span = 1.0);

struct ChannelConfig {
  double p_a_dbw = -156.0;     // authentic received power
  double n0_dbw_hz = -204.0;   // thermal noise density
  int m_s = 7;                 // multi-access signals
  double tau_c = 977.5e-9;     // chip interval, s
  double accum_t = 0.1;        // accumulation interval T, s
  double tau_d = 0.15;         // symmetric-difference tap offset, chips
  double tau_dll = 0.15;       // tracking tap offset, chips
  double w_p = 2.0e6;          // power-measurement bandwidth, Hz
  double sigma_p_db = 0.4;     // power measurement deviation, dB
  std::vector<double> tap_grid = uniform_taps(41);

  double p_a_watts() const { return db_to_linear(p_a_dbw); }
  double n0_watts() const { return db_to_linear(n0_dbw_hz); }

  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// Complex accumulations at `lags` (chips, relative to the code-phase
/// estimate), with the AGC gain and the per-component noise deviation that
/// produced them.
struct CorrelationSnapshot {
  std::vector<double> lags;
  std::vector<std::complex<double>> values;
  double beta_k = 1.0;
  double sigma_n = 0.0;

  /// Index of the tap at `lag` (within 1e-9 chips); throws ConfigError if absent.
  std::size_t tap_index(double lag) const;
};

/// Ideal triangular code autocorrelation, max(0, 1 - |tau|).
double autocorr(double tau);

/// Per-component accumulation noise deviation sqrt((N0 + M0) / 2T).
double noise_sigma(double n0_dbw_hz, double m0_w_hz, double accum_t);

/// Thermal-noise approximation of multi-access interference density,
/// (2/3) * m_s * p_bar_m * tau_c.
double multi_access_density(int m_s, double p_bar_m, double tau_c);

/// How interference is distributed over the received signal ensemble.
enum class PowerCase {
  kCleanOrSingleTarget,  // only the tracked signal carries interference
  kNoncoherentEnsemble,  // every signal carries power eta*P_A, no coherent term
  kCoherentEnsemble,     // every signal carries the same (eta, dtau, dtheta)
};

struct MultiAccessPower {
  double watts = 0.0;
  bool clamped = false;  // coherent term drove the raw value below zero
};

/// Average multi-access signal power for `power_case`.
MultiAccessPower pbar_m_for_case(PowerCase power_case, double p_a, const InterferenceParams& theta);

/// AGC amplitude gain sqrt(p_h0 / p_current).
double agc_gain(double p_current, double p_h0);

/// Code-phase estimate (chips, relative to the authentic code phase) taken as
/// the argmax of the noiseless composite magnitude. The search covers
/// [min(0,dtau) - 2, max(0,dtau) + 2] at `grid_step` plus the triangle
/// vertices, where the piecewise-linear composite attains its maximum. Ties
/// go to the smallest |estimate|.
double estimate_code_phase(const InterferenceParams& theta, double grid_step = 0.01);

/// Per-component tap covariance sigma_n^2 * R(lag_i - lag_j). Real and
/// imaginary parts are independent with this same covariance.
Eigen::MatrixXd noise_covariance(std::span<const double> lags, double sigma_n);

/// Cached sampler for composite snapshots over a fixed set of lags.
class SnapshotModel {
 public:
  /// Uses cfg.tap_grid when `lags` is empty.
  explicit SnapshotModel(const ChannelConfig& cfg, std::vector<double> lags = {});

  const ChannelConfig& config() const { return cfg_; }
  const std::vector<double>& lags() const { return lags_; }

  /// Interference-free total band power P_H0 (the AGC setpoint).
  double clean_power() const { return p_h0_; }

  /// Snapshot for `theta` with code-phase estimate `tau_hat`. When
  /// `with_noise` is false the rng is not touched.
  CorrelationSnapshot sample(const InterferenceParams& theta, PowerCase power_case, double tau_hat, Rng& rng,
                             bool with_noise = true) const;

  CorrelationSnapshot sample(const InterferenceParams& theta, PowerCase power_case, Rng& rng,
                             bool with_noise = true) const {
    return sample(theta, power_case, estimate_code_phase(theta), rng, with_noise);
  }

  /// AGC gain and per-component noise deviation for a given case.
  double beta(const InterferenceParams& theta, PowerCase power_case) const;
  double sigma_n(const InterferenceParams& theta, PowerCase power_case) const;

 private:
  ChannelConfig cfg_;
  std::vector<double> lags_;
  Eigen::MatrixXd unit_chol_;  // lower Cholesky factor of the unit-sigma covariance
  double p_h0_;
};

/// One-shot convenience over SnapshotModel using cfg.tap_grid.
CorrelationSnapshot composite_snapshot(const InterferenceParams& theta, const ChannelConfig& cfg,
                                       PowerCase power_case, Rng& rng, bool with_noise = true);

}  // namespace pdguard
