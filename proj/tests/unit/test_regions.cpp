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
#include <sstream>

#include "pdguard/error.hpp"
#include "pdguard/regions.hpp"

namespace pdguard {
namespace {

constexpr auto H0 = Hypothesis::kClean;
constexpr auto H2 = Hypothesis::kSpoofing;
constexpr auto H3 = Hypothesis::kJamming;

GridSpec small_spec(int n_d, int n_p, double d_max, double p_min, double p_max) {
  GridSpec s;
  s.d_min = 0.0;
  s.d_max = d_max;
  s.n_d = n_d;
  s.p_min = p_min;
  s.p_max = p_max;
  s.n_p = n_p;
  return s;
}

// Two Gaussian classes in (D, P) with a shared diagonal covariance.
SampleSet gaussian_classes(Hypothesis a, Observation ma, Hypothesis b, Observation mb, double sd_d, double sd_p,
                           int per_class, std::uint64_t seed) {
  SampleSet set;
  set.n_m = 1;
  Rng rng = make_stream(seed);
  for (int i = 0; i < per_class; ++i) {
    for (const auto& [h, m] : {std::pair{a, ma}, std::pair{b, mb}}) {
      const Observation z{m.d + sd_d * standard_normal(rng), m.p + sd_p * standard_normal(rng)};
      set.add({{}, h}, std::span(&z, 1));
    }
  }
  return set;
}

TEST(GridSpec, ClampsToBorder) {
  const GridSpec s;
  EXPECT_EQ(s.column_of(-5.0), 0);
  EXPECT_EQ(s.column_of(1e9), s.n_d - 1);
  EXPECT_EQ(s.row_of(-100.0), 0);
  EXPECT_EQ(s.row_of(15.0), s.n_p - 1);
  EXPECT_EQ(s.column_of(0.15), 1);
  EXPECT_NEAR(s.d_center(0), 0.05, 1e-12);
  GridSpec bad;
  bad.n_d = 8;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Samples, CountsFollowPriorsAndAreDeterministic) {
  PriorConfig priors;
  const auto a = generate_samples(priors, {}, 2000, 3, 11);
  const auto counts = a.counts();
  EXPECT_EQ(counts[0], 1200u);
  EXPECT_EQ(counts[1], 400u);
  EXPECT_EQ(counts[2], 100u);
  EXPECT_EQ(counts[3], 300u);
  EXPECT_EQ(a.observations.size(), 6000u);
  const auto b = generate_samples(priors, {}, 2000, 3, 11);
  ASSERT_EQ(a.observations.size(), b.observations.size());
  for (std::size_t i = 0; i < a.observations.size(); ++i) {
    ASSERT_EQ(a.observations[i].d, b.observations[i].d);
    ASSERT_EQ(a.observations[i].p, b.observations[i].p);
  }
  for (const auto& r : a.records) ASSERT_EQ(membership(r.theta, priors), r.hypothesis);
}

TEST(Samples, CleanOnlyPriors) {
  PriorConfig priors;
  priors.pi = {1.0, 0.0, 0.0, 0.0};
  const auto s = generate_samples(priors, {}, 500, 2, 3);
  EXPECT_EQ(s.counts()[0], 500u);
  EXPECT_EQ(s.records.size(), 500u);
}

TEST(InitialPartition, SingleClassFillsGrid) {
  PriorConfig priors;
  priors.pi = {1.0, 0.0, 0.0, 0.0};
  const auto s = generate_samples(priors, {}, 300, 2, 3);
  const Grid g = initial_partition(GridSpec{}, s);
  EXPECT_EQ(g.count(H0), g.labels.size());
}

TEST(InitialPartition, SeparatedClustersGiveTwoCleanRegions) {
  const auto s = gaussian_classes(H0, {5.0, 3.0}, H3, {20.0, 10.0}, 1.0, 1.0, 5000, 4);
  const Grid g = initial_partition(GridSpec{}, s);
  EXPECT_TRUE(all_regions_simply_connected(g));
  EXPECT_EQ(g.count(H0) + g.count(H3), g.labels.size());
  // purity: every training point lands in its own class region
  for (std::size_t l = 0; l < s.records.size(); ++l) {
    ASSERT_EQ(g.decide(s.observations_of(l)[0]), s.records[l].hypothesis);
  }
}

TEST(InitialPartition, EmptyCellsTakeNearestLabelTiesToLower) {
  const GridSpec spec = small_spec(16, 16, 16.0, 0.0, 16.0);
  SampleSet s;
  const Observation a{2.5, 8.5};
  const Observation b{12.5, 8.5};
  s.add({{}, H3}, std::span(&a, 1));
  s.add({{}, H2}, std::span(&b, 1));
  const Grid g = initial_partition(spec, s);
  EXPECT_EQ(g.at(8, 0), index(H3));
  EXPECT_EQ(g.at(8, 15), index(H2));
  // column 7 is equidistant from both; H2 has the lower index
  EXPECT_EQ(g.at(8, 7), index(H2));
  EXPECT_EQ(g.at(8, 6), index(H3));
  EXPECT_TRUE(all_regions_simply_connected(g));
}

TEST(BayesRisk, TrivialCases) {
  PriorConfig priors;
  priors.pi = {1.0, 0.0, 0.0, 0.0};
  const auto clean = generate_samples(priors, {}, 200, 2, 1);
  const Grid all0(GridSpec{}, 0);
  EXPECT_EQ(bayes_risk(all0, clean, CostMode::kUniform), 0.0);
  priors.pi = {0.0, 0.0, 1.0, 0.0};
  const auto spoofed = generate_samples(priors, {}, 200, 2, 1);
  EXPECT_EQ(bayes_risk(all0, spoofed, CostMode::kUniform), 1.0);
}

TEST(Refine, OptimalGridIsAFixpoint) {
  const auto s = gaussian_classes(H0, {5.0, 3.0}, H3, {20.0, 10.0}, 1.0, 1.0, 2000, 4);
  const auto costs = record_costs(s, CostMode::kUniform);
  const auto table = accumulate_cell_costs(GridSpec{}, s, costs);
  const Grid g = initial_partition(GridSpec{}, s);
  const auto res = refine(g, table);
  EXPECT_EQ(res.sweeps, 1);
  EXPECT_EQ(res.grid, g);
  EXPECT_EQ(res.risk, 0.0);
}

TEST(Refine, IncrementalRiskMatchesBruteForceEverySweep) {
  PriorConfig priors;
  const auto s = generate_samples(priors, {}, 4000, 5, 21);
  const GridSpec spec = small_spec(32, 32, 30.0, -2.0, 15.0);
  for (auto mode : {CostMode::kUniform, CostMode::kTheta}) {
    const auto costs = record_costs(s, mode);
    const auto table = accumulate_cell_costs(spec, s, costs);
    RefineOptions opt;
    int calls = 0;
    opt.on_sweep = [&](int, const Grid& g, double risk) {
      ++calls;
      const double brute = bayes_risk(g, s, costs);
      EXPECT_NEAR(risk, brute, 1e-12 * brute);
      EXPECT_TRUE(all_regions_simply_connected(g));
    };
    const auto res = refine(initial_partition(spec, s), table, opt);
    EXPECT_EQ(calls, res.sweeps);
    EXPECT_LE(res.risk, res.initial_risk);
    for (std::size_t i = 1; i < res.risk_history.size(); ++i) {
      if (i + 1 < res.risk_history.size()) {
        EXPECT_LT(res.risk_history[i], res.risk_history[i - 1]);
      } else {
        EXPECT_EQ(res.risk_history[i], res.risk_history[i - 1]);
      }
    }
  }
}

TEST(Refine, SweepCapIsAnError) {
  const auto s = gaussian_classes(H0, {8.0, 5.0}, H3, {11.0, 7.0}, 2.0, 2.0, 5000, 9);
  const auto costs = record_costs(s, CostMode::kUniform);
  const auto table = accumulate_cell_costs(GridSpec{}, s, costs);
  RefineOptions opt;
  opt.max_sweeps = 1;
  EXPECT_THROW(refine(initial_partition(GridSpec{}, s), table, opt), ConvergenceError);
}

// Equal priors, uniform cost, two Gaussian classes differing in D only: the
// Bayes boundary is the vertical line where 0.4 p0 = 0.9 p3.
TEST(Refine, GaussianBoundaryWithinTwoCells) {
  const double mu0 = 6.0;
  const double mu3 = 10.0;
  const double sd = 1.5;
  const auto s = gaussian_classes(H0, {mu0, 6.0}, H3, {mu3, 6.0}, sd, 3.0, 1000000, 6);
  const GridSpec spec = [] {
    GridSpec g;
    g.d_min = 2.0;
    g.d_max = 14.0;
    g.n_d = 64;
    g.p_min = 1.0;
    g.p_max = 11.0;
    g.n_p = 32;
    return g;
  }();
  const auto costs = record_costs(s, CostMode::kUniform);
  const auto res = refine(initial_partition(spec, s), accumulate_cell_costs(spec, s, costs));
  const double d_star =
      (2.0 * sd * sd * std::log(0.4 / 0.9) + mu3 * mu3 - mu0 * mu0) / (2.0 * (mu3 - mu0));
  const double width = (spec.d_max - spec.d_min) / spec.n_d;
  for (int r = 0; r < spec.n_p; ++r) {
    for (int k = 1; k < spec.n_d; ++k) {
      if (res.grid.at(r, k) == res.grid.at(r, k - 1)) continue;
      const double edge = spec.d_min + k * width;
      EXPECT_LE(std::abs(edge - d_star), 2.0 * width) << "row " << r;
    }
  }
}

TEST(Build, NoSpoofingPriorNoSpoofingRegion) {
  PriorConfig priors;
  priors.pi = {0.7, 0.2, 0.0, 0.1};
  BuildOptions opt;
  opt.n_p_total = 3000;
  opt.n_m = 4;
  const auto res = build_regions(priors, {}, GridSpec{}, 8, opt);
  EXPECT_EQ(res.grid.count(H2), 0u);
  EXPECT_TRUE(all_regions_simply_connected(res.grid));
}

TEST(RegionFile, RoundTripIsByteExact) {
  BuildOptions opt;
  opt.n_p_total = 2000;
  opt.n_m = 3;
  const auto res = build_regions({}, {}, GridSpec{}, 12, opt);
  std::stringstream a;
  write_regions(a, res.grid, {res.seed, res.risk, res.sweeps});
  RegionMeta meta;
  std::stringstream in(a.str());
  const Grid back = read_regions(in, &meta);
  EXPECT_EQ(back, res.grid);
  EXPECT_EQ(meta.seed, 12u);
  EXPECT_EQ(meta.risk, res.risk);
  std::stringstream b;
  write_regions(b, back, meta);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, 13), "PDREGIONS v1\n");
  EXPECT_EQ(a.str().back(), '\n');

  const auto again = build_regions({}, {}, GridSpec{}, 12, opt);
  std::stringstream c;
  write_regions(c, again.grid, {again.seed, again.risk, again.sweeps});
  EXPECT_EQ(a.str(), c.str());
}

TEST(RegionFile, Errors) {
  Grid g(small_spec(16, 16, 1.0, 0.0, 1.0), 2);
  std::stringstream good;
  write_regions(good, g, {});
  std::string text = good.str();

  std::stringstream v2("PDREGIONS v2\n" + text.substr(13));
  EXPECT_THROW(read_regions(v2), VersionError);

  std::string bad_digit = text;
  bad_digit[bad_digit.size() - 2] = '7';
  std::stringstream bd(bad_digit);
  try {
    read_regions(bd);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 20u);
  }

  std::stringstream no_newline(text.substr(0, text.size() - 1));
  EXPECT_THROW(read_regions(no_newline), ParseError);

  std::stringstream garbage("hello\n");
  EXPECT_THROW(read_regions(garbage), ParseError);
}

}  // namespace
}  // namespace pdguard
