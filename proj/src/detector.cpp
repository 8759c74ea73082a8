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

#include "pdguard/detector.hpp"

#include <ostream>
#include <string>

#include "pdguard/error.hpp"
#include "pdguard/numfmt.hpp"

namespace pdguard {

bool shadowing_gate(double p_db_rel, double cn0_drop_db, const GateConfig& gate) {
  return cn0_drop_db > gate.cn0_drop_db && p_db_rel < gate.power_anomaly_db;
}

DecisionRecord classify(const Grid& grid, double time, int channel, const Observation& z, double cn0_drop_db,
                        const GateConfig& gate) {
  return {time, channel, z, grid.decide(z), shadowing_gate(z.p, cn0_drop_db, gate)};
}

HistoryTrace cumulative_history(std::span<const DecisionRecord> decisions) {
  HistoryTrace out;
  std::size_t total = 0;
  for (const auto& d : decisions) total += d.gated ? 0 : 1;
  if (total == 0) return out;
  std::array<std::size_t, kNumHypotheses> counts{};
  for (const auto& d : decisions) {
    if (d.gated) continue;
    ++counts[static_cast<std::size_t>(index(d.decision))];
    out.time.push_back(d.time);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out.trace[i].push_back(static_cast<double>(counts[i]) / static_cast<double>(total));
    }
  }
  return out;
}

ClassificationMatrix classification_matrix(std::span<const LabeledDecision> decisions) {
  std::array<std::array<std::size_t, kNumHypotheses>, kNumHypotheses> counts{};
  std::array<std::size_t, kNumHypotheses> column{};
  for (const auto& d : decisions) {
    if (d.gated) continue;
    ++counts[static_cast<std::size_t>(index(d.decision))][static_cast<std::size_t>(index(d.truth))];
    ++column[static_cast<std::size_t>(index(d.truth))];
  }
  ClassificationMatrix m{};
  for (std::size_t j = 0; j < column.size(); ++j) {
    if (column[j] == 0) {
      throw ConfigError(std::string("no decisions with truth ") + std::string(hypothesis_label(hypothesis_from_index(static_cast<int>(j)))));
    }
    for (std::size_t i = 0; i < column.size(); ++i) {
      m[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(column[j]);
    }
  }
  return m;
}

const char* alarm_label(Alarm a) {
  switch (a) {
    case Alarm::kSpoofing:
      return "spoofing";
    case Alarm::kJamming:
      return "jamming";
    case Alarm::kNone:
      break;
  }
  return "none";
}

void VoteRule::validate() const {
  if (m < 1 || k < m) throw ConfigError("vote rule needs 1 <= m <= k");
}

Alarm windowed_alarm(std::span<const Hypothesis> window, const VoteRule& rule) {
  rule.validate();
  const std::size_t k = static_cast<std::size_t>(rule.k);
  const auto recent = window.size() > k ? window.last(k) : window;
  int spoof = 0;
  int jam = 0;
  for (auto h : recent) {
    spoof += h == Hypothesis::kSpoofing;
    jam += h == Hypothesis::kJamming;
  }
  if (spoof >= rule.m) return Alarm::kSpoofing;
  if (jam >= rule.m) return Alarm::kJamming;
  return Alarm::kNone;
}

WindowedAlarm::WindowedAlarm(VoteRule rule) : rule_(rule) { rule_.validate(); }

Alarm WindowedAlarm::push(const DecisionRecord& record) {
  if (!record.gated) {
    window_.push_back(record.decision);
    ++counts_[static_cast<std::size_t>(index(record.decision))];
    if (window_.size() > static_cast<std::size_t>(rule_.k)) {
      --counts_[static_cast<std::size_t>(index(window_.front()))];
      window_.pop_front();
    }
  }
  if (counts_[index(Hypothesis::kSpoofing)] >= rule_.m) return Alarm::kSpoofing;
  if (counts_[index(Hypothesis::kJamming)] >= rule_.m) return Alarm::kJamming;
  return Alarm::kNone;
}

Alarm multi_channel_vote(std::span<const Hypothesis> channel_decisions, int n_min) {
  if (channel_decisions.empty()) throw ConfigError("vote needs at least one channel");
  if (n_min < 1) throw ConfigError("n_min must be positive");
  int spoof = 0;
  int jam = 0;
  for (auto h : channel_decisions) {
    spoof += h == Hypothesis::kSpoofing;
    jam += h == Hypothesis::kJamming;
  }
  if (spoof >= n_min) return Alarm::kSpoofing;
  if (jam >= n_min) return Alarm::kJamming;
  return Alarm::kNone;
}

void write_decision_log_header(std::ostream& out) { out << "t,channel,D,P,decision,gated\n"; }

void write_decision_log_row(std::ostream& out, const DecisionRecord& r) {
  out << format_double(r.time) << ',' << r.channel << ',' << format_double(r.observation.d) << ','
      << format_double(r.observation.p) << ',' << index(r.decision) << ',' << (r.gated ? 1 : 0) << '\n';
}

void write_classification_matrix(std::ostream& out, const ClassificationMatrix& m) {
  out << "decision";
  for (auto h : kAllHypotheses) out << ',' << hypothesis_label(h);
  out << '\n';
  for (auto i : kAllHypotheses) {
    out << hypothesis_label(i);
    for (auto j : kAllHypotheses) out << ',' << format_fixed(m[static_cast<std::size_t>(index(i))][static_cast<std::size_t>(index(j))], 4);
    out << '\n';
  }
}

}  // namespace pdguard
