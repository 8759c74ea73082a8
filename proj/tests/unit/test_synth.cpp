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

#include <gtest/gtest.h>

#include <cmath>

#include "pdguard/error.hpp"
#include "pdguard/observables.hpp"
#include "pdguard/synth.hpp"

namespace pdguard {
namespace {

TEST(Scenario, NamesRoundTrip) {
  for (auto k : {ScenarioKind::kClean, ScenarioKind::kPullOff, ScenarioKind::kJamming}) {
    EXPECT_EQ(scenario_kind_from(scenario_name(k)), k);
  }
  EXPECT_THROW(scenario_kind_from("meaconing"), ConfigError);
}

TEST(Scenario, TimeLine) {
  ScenarioConfig sc;
  sc.kind = ScenarioKind::kPullOff;
  EXPECT_EQ(scenario_truth(sc, 100.0), Hypothesis::kClean);
  EXPECT_EQ(scenario_theta(sc, 100.0).eta, 0.0);
  EXPECT_EQ(scenario_truth(sc, 150.0), Hypothesis::kSpoofing);
  EXPECT_EQ(scenario_theta(sc, 150.0).delta_tau, 0.0);
  EXPECT_NEAR(scenario_theta(sc, 260.0).delta_tau, 1.0, 1e-12);
  const auto w = carry_off_window(sc, 0.15);
  EXPECT_NEAR(w.t0, 180.0, 1e-12);
  EXPECT_NEAR(w.t1, 272.0, 1e-9);

  sc.kind = ScenarioKind::kJamming;
  EXPECT_EQ(scenario_truth(sc, 130.0), Hypothesis::kJamming);
  EXPECT_NEAR(scenario_theta(sc, 130.0).eta, 6.3, 1e-12);
  const auto none = carry_off_window(sc, 0.15);
  EXPECT_EQ(none.t1 - none.t0, 0.0);

  sc.pulloff_s = 10.0;
  EXPECT_THROW(sc.validate(), ConfigError);
}

TEST(Synthesize, ShapeAndDeterminism) {
  ScenarioConfig sc;
  sc.duration_s = 10.0;
  sc.channels = 2;
  const auto a = synthesize(sc, {}, 5);
  ASSERT_EQ(a.channels.size(), 2u);
  EXPECT_EQ(a.channels[0].size(), 1000u);
  EXPECT_EQ(a.power.times.size(), 100u);
  EXPECT_NEAR(a.channels[0].rate_hz, 100.0, 1e-9);
  EXPECT_NO_THROW(a.channels[1].validate(0.15));
  EXPECT_NE(a.channels[0].values, a.channels[1].values);
  const auto b = synthesize(sc, {}, 5);
  EXPECT_EQ(a.channels[1].values, b.channels[1].values);
  EXPECT_EQ(a.power.dbw, b.power.dbw);
  EXPECT_NE(synthesize(sc, {}, 6).channels[0].values, a.channels[0].values);
}

TEST(Synthesize, PowerFollowsCaseMean) {
  ChannelConfig cfg;
  cfg.sigma_p_db = 0.0;
  ScenarioConfig sc;
  sc.kind = ScenarioKind::kJamming;
  sc.duration_s = 200.0;
  sc.channels = 1;
  const auto s = synthesize(sc, cfg, 1);
  const double clean = linear_to_db(clean_power_watts(cfg));
  const double jam =
      linear_to_db(case_mean_power(cfg, PowerCase::kNoncoherentEnsemble, scenario_theta(sc, 150.0)));
  EXPECT_NEAR(s.power.dbw.front(), clean, 1e-9);
  EXPECT_NEAR(s.power.dbw.back(), jam, 1e-9);
  EXPECT_NEAR(s.power.times.front(), 0.045, 1e-12);
}

}  // namespace
}  // namespace pdguard
