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

#include "pdguard/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pdguard/error.hpp"
#include "pdguard/log.hpp"

namespace pdguard {
namespace {

constexpr int kMaxRejectionTries = 10000;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// corr(Z, F^-1(Phi(Z))) for a unit exponential F. By Stein's identity this is
// E[phi(Z) / (1 - Phi(Z))], integrated here with composite Simpson.
double normal_exponential_correlation() {
  static const double value = [] {
    constexpr double lo = -12.0;
    constexpr double hi = 12.0;
    constexpr int n = 24000;
    const double h = (hi - lo) / n;
    auto f = [](double z) { return normal_pdf(z) * normal_pdf(z) / normal_sf(z); };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return sum * h / 3.0;
  }();
  return value;
}

[[noreturn]] void rejection_exhausted(const char* what) {
  throw ConvergenceError(std::string("prior rejection sampling exhausted: ") + what);
}

double uniform_phase(Rng& rng) { return wrap_phase(kTwoPi * uniform01(rng)); }

double random_sign(Rng& rng) { return uniform01(rng) < 0.5 ? -1.0 : 1.0; }

InterferenceParams sample_multipath(const PriorConfig& cfg, Rng& rng) {
  const double r = copula_latent_correlation(cfg.mp_corr);
  const double mu_chips = mu_of_elevation(cfg.alpha_e) / cfg.tau_c_ns;
  const double eta_db_max = linear_to_db(cfg.eta_bound);
  for (int i = 0; i < kMaxRejectionTries; ++i) {
    const double z1 = standard_normal(rng);
    const double w = standard_normal(rng);
    const double z2 = r * z1 + std::sqrt(1.0 - r * r) * w;
    const double eta_db = cfg.mp_eta_mean_db + cfg.mp_eta_std_db * z1;
    const double dtau = -mu_chips * std::log(normal_sf(z2));
    const double phase = uniform_phase(rng);
    if (eta_db < eta_db_max && dtau > 0.0 && dtau < cfg.dtau_bound) {
      return {db_to_linear(eta_db), dtau, phase};
    }
  }
  rejection_exhausted("multipath");
}

InterferenceParams sample_spoofing(const PriorConfig& cfg, Rng& rng) {
  const double eta_db_min = linear_to_db(cfg.eta_bound);
  double eta_db = 0.0;
  int tries = 0;
  do {
    if (++tries > kMaxRejectionTries) rejection_exhausted("spoofing power");
    eta_db = cfg.sp_eta_mean_db + cfg.sp_eta_std_db * standard_normal(rng);
  } while (eta_db < eta_db_min);

  const double mu_chips = cfg.sp_mu_ns / cfg.tau_c_ns;
  std::exponential_distribution<double> delay(1.0 / mu_chips);
  double mag = 0.0;
  tries = 0;
  do {
    if (++tries > kMaxRejectionTries) rejection_exhausted("spoofing delay");
    mag = delay(rng);
  } while (!(mag > 0.0 && mag < cfg.dtau_bound));

  const double sign = random_sign(rng);
  return {db_to_linear(eta_db), sign * mag, uniform_phase(rng)};
}

InterferenceParams sample_jamming(const PriorConfig& cfg, Rng& rng) {
  double eta = 0.0;
  int tries = 0;
  do {
    if (++tries > kMaxRejectionTries) rejection_exhausted("jamming power");
    const double x = cfg.jam_nu + cfg.jam_sigma * standard_normal(rng);
    const double y = cfg.jam_sigma * standard_normal(rng);
    eta = std::hypot(x, y);
  } while (eta < cfg.eta_bound);

  const double mag = cfg.dtau_bound + (cfg.jam_dtau_max - cfg.dtau_bound) * uniform01(rng);
  const double sign = random_sign(rng);
  return {eta, sign * mag, uniform_phase(rng)};
}

}  // namespace

void PriorConfig::validate() const {
  double sum = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0)) throw ConfigError("prior probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("prior probabilities must sum to 1");
  if (!(mp_eta_std_db > 0.0) || !(sp_eta_std_db > 0.0)) throw ConfigError("power deviations must be > 0");
  if (!(sp_mu_ns > 0.0) || !(tau_c_ns > 0.0)) throw ConfigError("delay scales must be > 0");
  if (!(jam_sigma > 0.0) || !(jam_nu >= 0.0)) throw ConfigError("Rician parameters must be positive");
  if (!(eta_bound > 0.0) || !(dtau_bound > 0.0)) throw ConfigError("parameter-set bounds must be > 0");
  if (!(jam_dtau_max > dtau_bound)) throw ConfigError("jam_dtau_max must exceed dtau_bound");
  if (!(mp_corr > -1.0 && mp_corr < 1.0)) throw ConfigError("mp_corr must lie in (-1, 1)");
  copula_latent_correlation(mp_corr);
}

double mu_of_elevation(double alpha_e) {
  if (alpha_e < 20.0 || alpha_e > 80.0) {
    warn("elevation " + std::to_string(alpha_e) + " deg outside fitted range [20, 80]; clamped");
    alpha_e = std::clamp(alpha_e, 20.0, 80.0);
  }
  return 0.012 * alpha_e * alpha_e - 2.4 * alpha_e + 134.0;
}

double copula_latent_correlation(double target) {
  const double r = target / normal_exponential_correlation();
  if (!(std::abs(r) < 1.0)) throw ConfigError("correlation not reachable with a Gaussian copula");
  return r;
}

InterferenceParams sample_theta(Hypothesis h, const PriorConfig& cfg, Rng& rng) {
  switch (h) {
    case Hypothesis::kClean:
      return {0.0, cfg.dtau_bound * uniform01(rng), uniform_phase(rng)};
    case Hypothesis::kMultipath:
      return sample_multipath(cfg, rng);
    case Hypothesis::kSpoofing:
      return sample_spoofing(cfg, rng);
    case Hypothesis::kJamming:
      return sample_jamming(cfg, rng);
  }
  throw ConfigError("unknown hypothesis");
}

Hypothesis membership(const InterferenceParams& theta, const PriorConfig& cfg) {
  if (theta.eta == 0.0) return Hypothesis::kClean;
  if (theta.eta < cfg.eta_bound) {
    if (!(theta.delta_tau > 0.0 && theta.delta_tau < cfg.dtau_bound)) {
      warn("weak interference outside the multipath delay bounds; treated as multipath");
    }
    return Hypothesis::kMultipath;
  }
  return std::abs(theta.delta_tau) < cfg.dtau_bound ? Hypothesis::kSpoofing : Hypothesis::kJamming;
}

}  // namespace pdguard
