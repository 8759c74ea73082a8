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

#include <cstdint>
#include <string_view>
#include <vector>

#include "pdguard/correlator.hpp"
#include "pdguard/ingest.hpp"
#include "pdguard/observables.hpp"

namespace pdguard {

enum class ScenarioKind { kClean, kPullOff, kJamming };

ScenarioKind scenario_kind_from(std::string_view name);  // clean|pulloff|jamming
std::string_view scenario_name(ScenarioKind kind);

/// Time line of a synthetic recording. A spoofer appears aligned with the
/// authentic signal at onset_s, then drags its code phase away from
/// pulloff_s. A jammer simply switches on at onset_s.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kClean;
  double duration_s = 400.0;
  int decimation = 10;  // raw records per power sample and per decision epoch
  int channels = 4;
  double onset_s = 120.0;
  double pulloff_s = 180.0;
  double pulloff_rate = 0.0125;  // chips/s
  double spoof_eta = 1.1;
  double spoof_dtheta = 1.0;
  double jam_eta = 6.3;
  double jam_dtau = 5.0;

  void validate() const;
};

/// Interference and its hypothesis at time t.
InterferenceParams scenario_theta(const ScenarioConfig& sc, double t);
Hypothesis scenario_truth(const ScenarioConfig& sc, double t);

/// Span during which the spoofed and authentic peaks overlap at the +-tau_d
/// taps, i.e. the spoofer is visibly dragging the correlation apart. Empty
/// for other scenarios.
TimeSpan carry_off_window(const ScenarioConfig& sc, double tau_d);

struct Scenario {
  std::vector<AccumulationLog> channels;  // at decimation / cfg.accum_t Hz
  PowerLog power;                         // at the decimated rate, stamped at block centers
};

/// Raw accumulations follow the snapshot model with the accumulation time
/// shortened by the decimation factor, so block means reproduce the model at
/// cfg.accum_t. Every channel sees the same interference with its own noise.
Scenario synthesize(const ScenarioConfig& sc, const ChannelConfig& cfg, std::uint64_t seed,
                    const ObservableOptions& options = {});

}  // namespace pdguard
