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

#include "pdguard/synth.hpp"

#include <cmath>
#include <string>

#include "pdguard/error.hpp"
#include "pdguard/random.hpp"

namespace pdguard {

ScenarioKind scenario_kind_from(std::string_view name) {
  if (name == "clean") return ScenarioKind::kClean;
  if (name == "pulloff") return ScenarioKind::kPullOff;
  if (name == "jamming") return ScenarioKind::kJamming;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::string_view scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kPullOff:
      return "pulloff";
    case ScenarioKind::kJamming:
      return "jamming";
    case ScenarioKind::kClean:
      break;
  }
  return "clean";
}

void ScenarioConfig::validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("scenario duration must be > 0");
  if (decimation < 1 || channels < 1) throw ConfigError("decimation and channel count must be positive");
  if (!(onset_s >= 0.0) || !(pulloff_s >= onset_s)) throw ConfigError("pull-off must not precede onset");
  if (!(pulloff_rate > 0.0)) throw ConfigError("pull-off rate must be > 0");
  if (!(spoof_eta > 0.0) || !(jam_eta > 0.0)) throw ConfigError("interference eta must be > 0");
}

InterferenceParams scenario_theta(const ScenarioConfig& sc, double t) {
  if (sc.kind == ScenarioKind::kClean || t < sc.onset_s) return {};
  if (sc.kind == ScenarioKind::kJamming) return make_interference(sc.jam_eta, sc.jam_dtau, 0.0);
  const double dtau = t > sc.pulloff_s ? sc.pulloff_rate * (t - sc.pulloff_s) : 0.0;
  return make_interference(sc.spoof_eta, dtau, sc.spoof_dtheta);
}

Hypothesis scenario_truth(const ScenarioConfig& sc, double t) {
  if (sc.kind == ScenarioKind::kClean || t < sc.onset_s) return Hypothesis::kClean;
  return sc.kind == ScenarioKind::kJamming ? Hypothesis::kJamming : Hypothesis::kSpoofing;
}

TimeSpan carry_off_window(const ScenarioConfig& sc, double tau_d) {
  if (sc.kind != ScenarioKind::kPullOff) return {};
  return {sc.pulloff_s, sc.pulloff_s + (1.0 + tau_d) / sc.pulloff_rate};
}

Scenario synthesize(const ScenarioConfig& sc, const ChannelConfig& cfg, std::uint64_t seed,
                    const ObservableOptions& options) {
  sc.validate();
  cfg.validate();
  ChannelConfig raw_cfg = cfg;
  raw_cfg.accum_t = cfg.accum_t / sc.decimation;
  const double rate = 1.0 / raw_cfg.accum_t;
  const auto n_blocks = static_cast<std::size_t>(std::floor(sc.duration_s / cfg.accum_t));
  const std::size_t n_records = n_blocks * static_cast<std::size_t>(sc.decimation);

  const SnapshotModel model(raw_cfg);
  Scenario out;
  out.channels.resize(static_cast<std::size_t>(sc.channels));
  for (int c = 0; c < sc.channels; ++c) {
    auto& log = out.channels[static_cast<std::size_t>(c)];
    log.channel = c;
    log.rate_hz = rate;
    log.taps = raw_cfg.tap_grid;
    log.times.reserve(n_records);
    log.values.reserve(n_records * log.taps.size());
  }

  std::vector<Rng> noise;
  for (int c = 0; c < sc.channels; ++c) noise.push_back(make_stream(seed, 1, static_cast<std::uint64_t>(c)));
  for (std::size_t r = 0; r < n_records; ++r) {
    const double t = static_cast<double>(r) / rate;
    const InterferenceParams theta = scenario_theta(sc, t);
    const PowerCase pc = power_case_for(scenario_truth(sc, t), options);
    const double tau_hat = estimate_code_phase(theta);
    for (int c = 0; c < sc.channels; ++c) {
      const auto snap = model.sample(theta, pc, tau_hat, noise[static_cast<std::size_t>(c)]);
      out.channels[static_cast<std::size_t>(c)].append(t, snap.values);
    }
  }

  out.power.rate_hz = 1.0 / cfg.accum_t;
  out.power.w_p_hz = cfg.w_p;
  Rng power_rng = make_stream(seed, 2);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    // center of the block's raw timestamps
    const double t = (static_cast<double>(b * static_cast<std::size_t>(sc.decimation)) + 0.5 * (sc.decimation - 1)) / rate;
    const InterferenceParams theta = scenario_theta(sc, t);
    const double mean_w = case_mean_power(cfg, power_case_for(scenario_truth(sc, t), options), theta);
    const double noise_db = cfg.sigma_p_db > 0.0 ? cfg.sigma_p_db * standard_normal(power_rng) : 0.0;
    out.power.times.push_back(t);
    out.power.dbw.push_back(linear_to_db(mean_w) + noise_db);
  }
  return out;
}

}  // namespace pdguard
