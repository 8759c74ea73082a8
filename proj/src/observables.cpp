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

#include "pdguard/observables.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pdguard/error.hpp"
#include "pdguard/numfmt.hpp"

namespace pdguard {

double mean_power_watts(const ChannelConfig& cfg, std::span<const SignalTerm> ensemble) {
  if (ensemble.size() != static_cast<std::size_t>(cfg.m_s) + 1) {
    throw ConfigError("power ensemble must hold m_s + 1 signals");
  }
  double total = 0.0;
  for (const auto& s : ensemble) {
    total += (1.0 + s.eta) * s.p_a;
    if (s.coherent) {
      total += 2.0 * std::sqrt(s.eta) * s.p_a * std::cos(s.delta_theta) * autocorr(s.delta_tau);
    }
  }
  return total + cfg.n0_watts() * cfg.w_p;
}

std::vector<SignalTerm> power_ensemble(const ChannelConfig& cfg, PowerCase power_case,
                                       const InterferenceParams& theta) {
  const double p_a = cfg.p_a_watts();
  std::vector<SignalTerm> ensemble(static_cast<std::size_t>(cfg.m_s) + 1, SignalTerm{p_a, 0.0, 0.0, 0.0, true});
  const SignalTerm carried{p_a, theta.eta, theta.delta_tau, theta.delta_theta, true};
  switch (power_case) {
    case PowerCase::kCleanOrSingleTarget:
      ensemble[0] = carried;
      break;
    case PowerCase::kNoncoherentEnsemble:
      for (auto& s : ensemble) s = SignalTerm{p_a, theta.eta, theta.delta_tau, theta.delta_theta, false};
      break;
    case PowerCase::kCoherentEnsemble:
      for (auto& s : ensemble) s = carried;
      break;
  }
  return ensemble;
}

double clean_power_watts(const ChannelConfig& cfg) {
  return static_cast<double>(cfg.m_s + 1) * cfg.p_a_watts() + cfg.n0_watts() * cfg.w_p;
}

double reference_sigma_n0(const ChannelConfig& cfg) {
  return noise_sigma(cfg.n0_dbw_hz, multi_access_density(cfg.m_s, cfg.p_a_watts(), cfg.tau_c), cfg.accum_t);
}

double sample_power_db(double mean_w, double ref_w, double sigma_p, Rng& rng) {
  if (!(mean_w > 0.0) || !(ref_w > 0.0)) throw ConfigError("powers must be > 0");
  const double mean_db = linear_to_db(mean_w / ref_w);
  if (sigma_p == 0.0) return mean_db;
  return mean_db + sigma_p * standard_normal(rng);
}

double symmetric_difference(const CorrelationSnapshot& snap, double tau_d, double sigma_n0) {
  if (!(sigma_n0 > 0.0)) throw ConfigError("sigma_n0 must be > 0");
  const auto early = snap.values[snap.tap_index(-tau_d)];
  const auto late = snap.values[snap.tap_index(tau_d)];
  return std::abs(early - late) / sigma_n0;
}

double rayleigh_sigma_d2(double tau_d, double beta_k, double sigma_n, double sigma_n0) {
  if (!(tau_d > 0.0 && beta_k > 0.0 && sigma_n > 0.0 && sigma_n0 > 0.0)) {
    throw ConfigError("Rayleigh parameters must be > 0");
  }
  const double r = beta_k * sigma_n / sigma_n0;
  return 8.0 * tau_d * r * r;
}

double rayleigh_cdf(double x, double sigma_d2) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-x * x / sigma_d2);
}

PowerCase power_case_for(Hypothesis h, const ObservableOptions& options) {
  switch (h) {
    case Hypothesis::kClean:
    case Hypothesis::kMultipath:
      return PowerCase::kCleanOrSingleTarget;
    case Hypothesis::kSpoofing:
      return options.spoofing_case;
    case Hypothesis::kJamming:
      return PowerCase::kNoncoherentEnsemble;
  }
  throw ConfigError("unknown hypothesis");
}

ObservationSimulator::ObservationSimulator(const ChannelConfig& cfg, ObservableOptions options)
    : model_(cfg, {-cfg.tau_d, 0.0, cfg.tau_d}), options_(options), sigma_n0_(reference_sigma_n0(cfg)) {}

Observation ObservationSimulator::simulate(const InterferenceParams& theta, Hypothesis h, double tau_hat,
                                           Rng& rng) const {
  const PowerCase pc = power_case_for(h, options_);
  const auto snap = model_.sample(theta, pc, tau_hat, rng);
  // lags are {-tau_d, 0, +tau_d}
  Observation z;
  z.d = std::abs(snap.values[0] - snap.values[2]) / sigma_n0_;
  z.p = sample_power_db(case_mean_power(model_.config(), pc, theta), model_.clean_power(),
                        model_.config().sigma_p_db, rng);
  return z;
}

Observation simulate_observation(const InterferenceParams& theta, Hypothesis h, const ChannelConfig& cfg,
                                 const PriorConfig& priors, Rng& rng, const ObservableOptions& options) {
  if (membership(theta, priors) != h) {
    throw ConfigError("theta does not belong to hypothesis " + std::string(hypothesis_label(h)));
  }
  return ObservationSimulator(cfg, options).simulate(theta, h, rng);
}

void write_observation_csv_header(std::ostream& out) { out << "hyp,eta,dtau,dtheta,D,P\n"; }

void write_observation_row(std::ostream& out, const ObservationRow& row) {
  out << index(row.hypothesis) << ',' << format_double(row.theta.eta) << ',' << format_double(row.theta.delta_tau)
      << ',' << format_double(row.theta.delta_theta) << ',' << format_double(row.z.d) << ','
      << format_double(row.z.p) << '\n';
}

std::vector<ObservationRow> read_observation_csv(std::istream& in) {
  std::vector<ObservationRow> rows;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty observation CSV", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "hyp,eta,dtau,dtheta,D,P") throw ParseError("unexpected observation CSV header", line_no);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::array<std::string_view, 6> fields;
    std::string_view rest(line);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto comma = rest.find(',');
      if (i + 1 < fields.size()) {
        if (comma == std::string_view::npos) throw ParseError("expected 6 fields", line_no);
        fields[i] = rest.substr(0, comma);
        rest.remove_prefix(comma + 1);
      } else {
        if (comma != std::string_view::npos) throw ParseError("expected 6 fields", line_no);
        fields[i] = rest;
      }
    }
    const auto hyp = parse_int<int>(fields[0]);
    if (!hyp || *hyp < 0 || *hyp >= kNumHypotheses) throw ParseError("bad hypothesis index", line_no);
    std::array<double, 5> v{};
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto x = parse_double(fields[i]);
      if (!x) throw ParseError("bad numeric field", line_no);
      v[i - 1] = *x;
    }
    rows.push_back({static_cast<Hypothesis>(*hyp), {v[0], v[1], v[2]}, {v[3], v[4]}});
  }
  return rows;
}

}  // namespace pdguard
