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

#include "pdguard/monitor.hpp"

#include <algorithm>
#include <map>

#include "pdguard/error.hpp"

namespace pdguard {

MonitorResult monitor(const Grid& grid, std::span<const AccumulationLog> channels, const PowerLog& power,
                      const MonitorOptions& options, const PowerLog* cn0_drop) {
  if (channels.empty()) throw ConfigError("no accumulation logs");
  MonitorResult out;
  std::vector<const AccumulationLog*> logs;
  for (const auto& c : channels) logs.push_back(&c);
  out.sigma_n0_raw = estimate_sigma_n0(logs, options.ingest.quiet, options.ingest.noise);

  for (const auto& log : channels) {
    const IngestResult res = ingest(log, power, out.sigma_n0_raw, options.ingest);
    out.n_excised += res.n_excised;
    out.n_invalid += res.n_invalid;
    std::vector<double> times;
    for (const auto& o : res.observations) times.push_back(o.t);
    std::vector<double> drops(times.size(), 0.0);
    if (cn0_drop && !cn0_drop->times.empty() && !times.empty()) {
      const auto a = align_power(*cn0_drop, times);
      for (std::size_t i = 0; i < times.size(); ++i) drops[i] = a.valid[i] ? a.dbw[i] : 0.0;
    }
    for (std::size_t i = 0; i < res.observations.size(); ++i) {
      const auto& o = res.observations[i];
      out.decisions.push_back(classify(grid, o.t, log.channel, o.z, drops[i], options.gate));
    }
  }
  std::stable_sort(out.decisions.begin(), out.decisions.end(), [](const DecisionRecord& a, const DecisionRecord& b) {
    return a.time < b.time || (a.time == b.time && a.channel < b.channel);
  });

  std::map<int, WindowedAlarm> windows;
  std::map<int, Alarm> state;
  Alarm previous = Alarm::kNone;
  for (std::size_t i = 0; i < out.decisions.size();) {
    const double t = out.decisions[i].time;
    for (; i < out.decisions.size() && out.decisions[i].time == t; ++i) {
      const auto& d = out.decisions[i];
      auto it = windows.try_emplace(d.channel, options.vote).first;
      state[d.channel] = it->second.push(d);
    }
    std::vector<Hypothesis> votes;
    for (const auto& [ch, a] : state) {
      votes.push_back(a == Alarm::kSpoofing   ? Hypothesis::kSpoofing
                      : a == Alarm::kJamming ? Hypothesis::kJamming
                                             : Hypothesis::kClean);
    }
    const Alarm now = multi_channel_vote(votes, options.n_min);
    out.epochs.push_back({t, now});
    if (now != previous) out.events.push_back({t, now});
    previous = now;
  }
  return out;
}

}  // namespace pdguard
