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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pdguard/correlator.hpp"
#include "pdguard/cost.hpp"
#include "pdguard/grid.hpp"
#include "pdguard/observables.hpp"
#include "pdguard/priors.hpp"

namespace pdguard {

struct SampleRecord {
  InterferenceParams theta;
  Hypothesis hypothesis = Hypothesis::kClean;
};

/// Monte-Carlo training set. Record l owns observations
/// [l * n_m, (l + 1) * n_m).
struct SampleSet {
  std::vector<SampleRecord> records;
  std::vector<Observation> observations;
  int n_m = 0;

  std::span<const Observation> observations_of(std::size_t record) const {
    return {observations.data() + record * static_cast<std::size_t>(n_m), static_cast<std::size_t>(n_m)};
  }
  std::array<std::size_t, kNumHypotheses> counts() const;
  void add(const SampleRecord& record, std::span<const Observation> obs);
};

/// N_i = round(pi_i * n_p_total) draws per hypothesis, n_m observations each.
/// Every draw gets its own stream, so the result depends only on `seed`.
SampleSet generate_samples(const PriorConfig& priors, const ChannelConfig& cfg, std::size_t n_p_total, int n_m,
                           std::uint64_t seed, const ObservableOptions& options = {});

/// Per-record cost of each decision.
std::vector<std::array<double, kNumHypotheses>> record_costs(const SampleSet& samples, CostMode mode,
                                                             const ThetaCostParams& params = {});

/// Cost of each decision summed over the observations falling in each cell.
struct CellCosts {
  GridSpec spec;
  std::vector<std::array<double, kNumHypotheses>> sums;
  std::size_t n_observations = 0;
};

CellCosts accumulate_cell_costs(const GridSpec& spec, const SampleSet& samples,
                                std::span<const std::array<double, kNumHypotheses>> costs);

/// Majority vote per cell, empty cells from the nearest non-empty cell, then
/// islands and holes are flooded until every region is simply connected.
Grid initial_partition(const GridSpec& spec, const SampleSet& samples);

/// Floods islands and fills holes until all labels are simply connected.
void enforce_simple_connectivity(Grid& grid);

/// Average cost over all observations, evaluated one observation at a time.
double bayes_risk(const Grid& grid, const SampleSet& samples, CostMode mode, const ThetaCostParams& params = {});
double bayes_risk(const Grid& grid, const SampleSet& samples,
                  std::span<const std::array<double, kNumHypotheses>> costs);

struct RefineOptions {
  int max_sweeps = 500;
  bool check_every_mutation = false;  // forced on in debug builds
  /// Called after every sweep with the grid and its incrementally tracked risk.
  std::function<void(int sweep, const Grid& grid, double risk)> on_sweep;
};

struct RefineResult {
  Grid grid;
  double initial_risk = 0.0;
  double risk = 0.0;
  int sweeps = 0;
  std::vector<double> risk_history;  // after each sweep
};

RefineResult refine(Grid grid, const CellCosts& costs, const RefineOptions& options = {});

struct BuildOptions {
  std::size_t n_p_total = 100000;
  int n_m = 20;
  CostMode cost_mode = CostMode::kTheta;
  ThetaCostParams cost_params;
  ObservableOptions observable;
  RefineOptions refine;
};

struct BuildResult {
  Grid grid;
  std::uint64_t seed = 0;
  double initial_risk = 0.0;
  double risk = 0.0;
  int sweeps = 0;
  std::vector<double> risk_history;
};

BuildResult build_regions(const PriorConfig& priors, const ChannelConfig& cfg, const GridSpec& spec,
                          std::uint64_t seed, const BuildOptions& options = {});

/// Region file metadata beyond the grid itself.
struct RegionMeta {
  std::uint64_t seed = 0;
  double risk = 0.0;
  int sweeps = 0;
};

void write_regions(std::ostream& out, const Grid& grid, const RegionMeta& meta);
/// Throws VersionError on an unknown version, ParseError otherwise.
Grid read_regions(std::istream& in, RegionMeta* meta = nullptr);

}  // namespace pdguard
