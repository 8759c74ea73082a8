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

#include <array>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include "pdguard/grid.hpp"
#include "pdguard/observables.hpp"
#include "pdguard/types.hpp"

namespace pdguard {

struct DecisionRecord {
  double time = 0.0;
  int channel = 0;
  Observation observation;
  Hypothesis decision = Hypothesis::kClean;
  bool gated = false;
};

inline Hypothesis decide(const Grid& grid, const Observation& z) { return grid.decide(z); }

struct GateConfig {
  double cn0_drop_db = 6.0;
  double power_anomaly_db = 1.0;
};

/// True when a C/N0 collapse without a power anomaly points at shadowing
/// rather than interference; such epochs are excluded.
bool shadowing_gate(double p_db_rel, double cn0_drop_db, const GateConfig& gate = {});

/// Classifies one observation; `cn0_drop_db` feeds the gate.
DecisionRecord classify(const Grid& grid, double time, int channel, const Observation& z, double cn0_drop_db = 0.0,
                        const GateConfig& gate = {});

/// trace[i][k]: decisions equal to H_i among the first k+1 ungated records,
/// divided by the total number of ungated records.
struct HistoryTrace {
  std::vector<double> time;
  std::array<std::vector<double>, kNumHypotheses> trace;
};

HistoryTrace cumulative_history(std::span<const DecisionRecord> decisions);

struct LabeledDecision {
  Hypothesis truth = Hypothesis::kClean;
  Hypothesis decision = Hypothesis::kClean;
  bool gated = false;
};

/// m[i][j]: fraction of truth-H_j decisions that chose H_i. Every truth class
/// must appear at least once.
using ClassificationMatrix = std::array<std::array<double, kNumHypotheses>, kNumHypotheses>;
ClassificationMatrix classification_matrix(std::span<const LabeledDecision> decisions);

enum class Alarm { kNone, kSpoofing, kJamming };
const char* alarm_label(Alarm a);

struct VoteRule {
  int m = 6;
  int k = 20;
  void validate() const;
};

/// m-of-k test over the last k entries of `window`. Spoofing wins ties.
Alarm windowed_alarm(std::span<const Hypothesis> window, const VoteRule& rule);

/// Streaming m-of-k state for one channel. Gated records are ignored.
class WindowedAlarm {
 public:
  explicit WindowedAlarm(VoteRule rule);
  Alarm push(const DecisionRecord& record);
  const std::deque<Hypothesis>& window() const { return window_; }

 private:
  VoteRule rule_;
  std::deque<Hypothesis> window_;
  std::array<int, kNumHypotheses> counts_{};
};

/// Alarm when at least `n_min` channels agree on H2 (or H3) at one epoch.
Alarm multi_channel_vote(std::span<const Hypothesis> channel_decisions, int n_min);

void write_decision_log_header(std::ostream& out);
void write_decision_log_row(std::ostream& out, const DecisionRecord& record);
void write_classification_matrix(std::ostream& out, const ClassificationMatrix& m);

}  // namespace pdguard
