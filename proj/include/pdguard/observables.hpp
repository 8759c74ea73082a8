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

// The two detector observables: received band power P (dB relative to the
// interference-free mean) and the symmetric difference D of the
// correlation function, plus the Monte-Carlo simulator that draws them.

#include <iosfwd>
#include <span>
#include <vector>

#include "pdguard/correlator.hpp"
#include "pdguard/priors.hpp"
#include "pdguard/random.hpp"
#include "pdguard/types.hpp"

namespace pdguard {

struct Observation {
  double d = 0.0;  // symmetric difference, dimensionless
  double p = 0.0;  // received power, dB relative to the clean mean
};

struct MultiChannelObservation {
  std::vector<double> d_per_channel;
  double p = 0.0;
};

/// One received signal's contribution to band power. With `coherent` false
/// the authentic/interference cross term is taken to average out.
struct SignalTerm {
  double p_a = 0.0;
  double eta = 0.0;
  double delta_tau = 0.0;
  double delta_theta = 0.0;
  bool coherent = true;
};

/// Mean band power: sum over signals of (1+eta)P_A + 2 sqrt(eta) P_A cos(dtheta) R(dtau),
/// plus N0 * W_P. Requires ensemble.size() == m_s + 1.
double mean_power_watts(const ChannelConfig& cfg, std::span<const SignalTerm> ensemble);

/// Ensemble of m_s + 1 signals with interference laid out per `power_case`.
std::vector<SignalTerm> power_ensemble(const ChannelConfig& cfg, PowerCase power_case,
                                       const InterferenceParams& theta);

inline double case_mean_power(const ChannelConfig& cfg, PowerCase power_case, const InterferenceParams& theta) {
  const auto ensemble = power_ensemble(cfg, power_case, theta);
  return mean_power_watts(cfg, ensemble);
}

/// P_H0: mean band power with no interference.
double clean_power_watts(const ChannelConfig& cfg);

/// sigma_N in the interference-free case (M0 evaluated with P_M = P_A).
double reference_sigma_n0(const ChannelConfig& cfg);

/// 10 log10(mean_w / ref_w) plus a N(0, sigma_p^2) measurement error.
double sample_power_db(double mean_w, double ref_w, double sigma_p, Rng& rng);

/// |xi(-tau_d) - xi(+tau_d)| / sigma_n0.
double symmetric_difference(const CorrelationSnapshot& snap, double tau_d, double sigma_n0);

/// Complex variance of the scaled tap difference, 8 tau_d (beta sigma_n / sigma_n0)^2.
/// With no coherent interference D is the modulus of a circular complex
/// Gaussian with this variance, so D^2 has mean sigma_d^2.
double rayleigh_sigma_d2(double tau_d, double beta_k, double sigma_n, double sigma_n0);

/// CDF of that modulus: 1 - exp(-x^2 / sigma_d2).
double rayleigh_cdf(double x, double sigma_d2);

struct ObservableOptions {
  /// Ensemble case used for H2 draws; the figure-matching default is coherent.
  PowerCase spoofing_case = PowerCase::kCoherentEnsemble;
};

PowerCase power_case_for(Hypothesis h, const ObservableOptions& options = {});

/// Draws observations for fixed configuration. Only the +/- tau_d and prompt
/// taps are simulated: the marginal of the tap-noise Gaussian on those lags is
/// exactly the full-grid model restricted to them.
class ObservationSimulator {
 public:
  explicit ObservationSimulator(const ChannelConfig& cfg, ObservableOptions options = {});

  Observation simulate(const InterferenceParams& theta, Hypothesis h, double tau_hat, Rng& rng) const;
  Observation simulate(const InterferenceParams& theta, Hypothesis h, Rng& rng) const {
    return simulate(theta, h, estimate_code_phase(theta), rng);
  }

  double sigma_n0() const { return sigma_n0_; }
  double clean_power() const { return model_.clean_power(); }
  const SnapshotModel& snapshot_model() const { return model_; }
  const ObservableOptions& options() const { return options_; }

 private:
  SnapshotModel model_;
  ObservableOptions options_;
  double sigma_n0_;
};

/// Single draw; throws ConfigError when membership(theta) != h.
Observation simulate_observation(const InterferenceParams& theta, Hypothesis h, const ChannelConfig& cfg,
                                 const PriorConfig& priors, Rng& rng, const ObservableOptions& options = {});

// CSV batch format: header "hyp,eta,dtau,dtheta,D,P", one row per draw.
struct ObservationRow {
  Hypothesis hypothesis = Hypothesis::kClean;
  InterferenceParams theta;
  Observation z;
};

void write_observation_csv_header(std::ostream& out);
void write_observation_row(std::ostream& out, const ObservationRow& row);
std::vector<ObservationRow> read_observation_csv(std::istream& in);

}  // namespace pdguard
