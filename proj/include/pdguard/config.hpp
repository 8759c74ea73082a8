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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "pdguard/correlator.hpp"
#include "pdguard/cost.hpp"
#include "pdguard/detector.hpp"
#include "pdguard/grid.hpp"
#include "pdguard/ingest.hpp"
#include "pdguard/observables.hpp"
#include "pdguard/priors.hpp"
#include "pdguard/synth.hpp"

namespace pdguard {

/// Everything a command may need. Keys are "section.name"; see set().
struct RunConfig {
  ChannelConfig channel;
  PriorConfig priors;
  ObservableOptions observable;
  CostMode cost_mode = CostMode::kTheta;
  ThetaCostParams cost_params;
  GridSpec grid;
  std::optional<std::uint64_t> seed;
  std::size_t n_p = 100000;
  int n_m = 20;
  int max_sweeps = 500;
  std::size_t eval_n_p = 100000;
  int eval_n_m = 20;
  VoteRule vote;
  int n_min = 1;
  GateConfig gate;
  TimeSpan quiet{0.0, 60.0};
  bool excise = false;
  ExcisionOptions excision;
  ScenarioConfig scenario;

  /// Applies one setting. Throws ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  void validate() const;
  /// Commands never seed from the clock.
  std::uint64_t require_seed() const;
};

/// Reads "key = value" lines, '#' comments and "[section]" headers on top of
/// `base`. Errors name the offending line.
RunConfig load_config(std::istream& in, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

std::string_view cost_mode_name(CostMode mode);
CostMode cost_mode_from(std::string_view name);  // uniform|theta

/// "dmin,dmax,nd,pmin,pmax,np"
GridSpec parse_grid(std::string_view text);

}  // namespace pdguard
