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

// Parameter sets and conditional priors w_i(theta) for the four hypotheses.

#include <array>

#include "pdguard/random.hpp"
#include "pdguard/types.hpp"

namespace pdguard {

struct PriorConfig {
  std::array<double, kNumHypotheses> pi{0.6, 0.2, 0.05, 0.15};
  double alpha_e = 30.0;  // satellite elevation, degrees

  // H1: dB-power marginal, exponential delay marginal tied to elevation,
  // coupled through a Gaussian copula to this linear correlation.
  double mp_eta_mean_db = -21.0;
  double mp_eta_std_db = 5.0;
  double mp_corr = -0.23;

  // H2
  double sp_eta_mean_db = 1.0;
  double sp_eta_std_db = 0.5;
  double sp_mu_ns = 120.0;

  // H3: Rician over linear eta, delay uniform beyond the correlation support
  double jam_nu = 4.0;
  double jam_sigma = 2.0;
  double jam_dtau_max = 10.0;

  double eta_bound = 1.0;   // eta_1, linear
  double dtau_bound = 2.0;  // dtau_1, chips
  double tau_c_ns = 977.5;

  void validate() const;
};

/// Mean (ns) of the multipath delay exponential, 0.012 a^2 - 2.4 a + 134.
/// Elevations outside the fitted [20, 80] degrees are clamped with a warning.
double mu_of_elevation(double alpha_e);

/// Latent normal correlation that yields linear correlation `target` between
/// a normal variate and the exponential quantile transform of its partner.
double copula_latent_correlation(double target);

/// Draws theta from w_h. Rejection loops give up after 10^4 tries with a
/// ConvergenceError.
InterferenceParams sample_theta(Hypothesis h, const PriorConfig& cfg, Rng& rng);

/// Which parameter set theta falls in. Weak interference outside the
/// multipath bounds (e.g. an echo delayed beyond dtau_1) is reported as H1
/// with a warning.
Hypothesis membership(const InterferenceParams& theta, const PriorConfig& cfg = {});

}  // namespace pdguard
