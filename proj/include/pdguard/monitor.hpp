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

#include <span>
#include <vector>

#include "pdguard/detector.hpp"
#include "pdguard/grid.hpp"
#include "pdguard/ingest.hpp"

namespace pdguard {

struct MonitorOptions {
  IngestOptions ingest;
  VoteRule vote;
  int n_min = 1;  // channels whose window must agree before the receiver alarms
  GateConfig gate;
};

struct EpochAlarm {
  double t = 0.0;
  Alarm alarm = Alarm::kNone;
};

struct MonitorResult {
  double sigma_n0_raw = 0.0;
  std::vector<DecisionRecord> decisions;  // by time, then channel
  std::vector<EpochAlarm> epochs;         // receiver-level alarm state per epoch
  std::vector<EpochAlarm> events;         // state changes only
  std::size_t n_excised = 0;
  std::size_t n_invalid = 0;
};

/// Ingests every channel against one shared noise reference, classifies each
/// epoch, runs the per-channel m-of-k windows and votes across channels.
/// `cn0_drop` (dB over time, same layout as a power log) feeds the shadowing
/// gate; epochs outside it count as no drop.
MonitorResult monitor(const Grid& grid, std::span<const AccumulationLog> channels, const PowerLog& power,
                      const MonitorOptions& options, const PowerLog* cn0_drop = nullptr);

}  // namespace pdguard
