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

#include "pdguard/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pdguard/error.hpp"
#include "pdguard/log.hpp"
#include "pdguard/random.hpp"

namespace pdguard {
namespace {

constexpr std::array<std::array<int, 2>, 4> kN4{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};

template <class Fn>
void for_each_n4(const Grid& grid, std::size_t c, Fn&& fn) {
  const int cols = grid.cols();
  const int r = static_cast<int>(c / static_cast<std::size_t>(cols));
  const int k = static_cast<int>(c % static_cast<std::size_t>(cols));
  for (const auto& [dr, dc] : kN4) {
    const int rr = r + dr;
    const int kk = k + dc;
    if (rr < 0 || rr >= grid.rows() || kk < 0 || kk >= cols) continue;
    fn(static_cast<std::size_t>(rr) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(kk));
  }
}

int argmax_lowest(const std::array<std::size_t, kNumHypotheses>& v) {
  int best = 0;
  for (int i = 1; i < kNumHypotheses; ++i) {
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

// Fills empty cells from the nearest labelled cell by growing square rings
// until the ring distance exceeds the best Euclidean distance found.
// Exact 1-D squared distance transform (lower envelope of parabolas).
void distance_transform_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                           std::vector<double>& z) {
  const auto n = f.size();
  auto parabola_meet = [&](std::size_t q, std::size_t p) {
    const auto qd = static_cast<double>(q);
    const auto pd = static_cast<double>(p);
    return ((f[q] + qd * qd) - (f[p] + pd * pd)) / (2.0 * (qd - pd));
  };
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < n; ++q) {
    double s = parabola_meet(q, static_cast<std::size_t>(v[k]));
    while (s <= z[k]) {
      --k;
      s = parabola_meet(q, static_cast<std::size_t>(v[k]));
    }
    ++k;
    v[k] = static_cast<int>(q);
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const auto p = static_cast<std::size_t>(v[k]);
    const double dq = static_cast<double>(q) - static_cast<double>(p);
    d[q] = dq * dq + f[p];
  }
}

// Squared Euclidean distance (in cells) from every cell to the nearest cell
// where `site` is set.
std::vector<double> squared_distance(const Grid& grid, const std::vector<char>& site) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  // larger than any in-grid distance, small enough to stay exact
  const double kFar = 4.0 * (static_cast<double>(rows) * rows + static_cast<double>(cols) * cols) + 1.0;
  std::vector<double> out(grid.labels.size());
  const int n = std::max(rows, cols);
  std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  f.resize(static_cast<std::size_t>(rows));
  d.resize(static_cast<std::size_t>(rows));
  for (int k = 0; k < cols; ++k) {
    for (int r = 0; r < rows; ++r) {
      f[static_cast<std::size_t>(r)] = site[static_cast<std::size_t>(r) * cols + k] ? 0.0 : kFar;
    }
    distance_transform_1d(f, d, v, z);
    for (int r = 0; r < rows; ++r) out[static_cast<std::size_t>(r) * cols + k] = d[static_cast<std::size_t>(r)];
  }
  f.resize(static_cast<std::size_t>(cols));
  d.resize(static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * cols;
    std::copy_n(out.begin() + static_cast<std::ptrdiff_t>(base), cols, f.begin());
    distance_transform_1d(f, d, v, z);
    std::copy_n(d.begin(), cols, out.begin() + static_cast<std::ptrdiff_t>(base));
  }
  return out;
}

// Empty cells take the label of the nearest non-empty cell, ties to the lower label.
void fill_empty(Grid& grid, const std::vector<char>& filled) {
  std::vector<double> best(grid.labels.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> label(grid.labels.size(), 0);
  std::vector<char> site(grid.labels.size());
  for (std::uint8_t h = 0; h < kNumHypotheses; ++h) {
    bool present = false;
    for (std::size_t c = 0; c < site.size(); ++c) {
      site[c] = filled[c] && grid.labels[c] == h;
      present = present || site[c];
    }
    if (!present) continue;
    const auto d2 = squared_distance(grid, site);
    for (std::size_t c = 0; c < d2.size(); ++c) {
      if (d2[c] < best[c]) {
        best[c] = d2[c];
        label[c] = h;
      }
    }
  }
  for (std::size_t c = 0; c < grid.labels.size(); ++c) {
    if (!filled[c]) grid.labels[c] = label[c];
  }
}

void check_topology(const Grid& grid, const char* where) {
  if (!all_regions_simply_connected(grid)) {
    throw Error(std::string("region topology broken ") + where);
  }
}

}  // namespace

std::array<std::size_t, kNumHypotheses> SampleSet::counts() const {
  std::array<std::size_t, kNumHypotheses> n{};
  for (const auto& r : records) ++n[static_cast<std::size_t>(index(r.hypothesis))];
  return n;
}

void SampleSet::add(const SampleRecord& record, std::span<const Observation> obs) {
  if (records.empty() && observations.empty()) n_m = static_cast<int>(obs.size());
  if (static_cast<int>(obs.size()) != n_m) throw ConfigError("every record needs n_m observations");
  records.push_back(record);
  observations.insert(observations.end(), obs.begin(), obs.end());
}

SampleSet generate_samples(const PriorConfig& priors, const ChannelConfig& cfg, std::size_t n_p_total, int n_m,
                           std::uint64_t seed, const ObservableOptions& options) {
  priors.validate();
  if (n_m < 1) throw ConfigError("n_m must be positive");
  const ObservationSimulator sim(cfg, options);
  SampleSet set;
  set.n_m = n_m;
  std::vector<Observation> obs(static_cast<std::size_t>(n_m));
  for (auto h : kAllHypotheses) {
    const auto n_i = static_cast<std::size_t>(std::llround(priors.pi[static_cast<std::size_t>(index(h))] *
                                                           static_cast<double>(n_p_total)));
    for (std::size_t l = 0; l < n_i; ++l) {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(index(h)), l);
      const InterferenceParams theta = sample_theta(h, priors, rng);
      const double tau_hat = estimate_code_phase(theta);
      for (auto& z : obs) z = sim.simulate(theta, h, tau_hat, rng);
      set.add({theta, h}, obs);
    }
  }
  return set;
}

std::vector<std::array<double, kNumHypotheses>> record_costs(const SampleSet& samples, CostMode mode,
                                                             const ThetaCostParams& params) {
  std::vector<std::array<double, kNumHypotheses>> out;
  out.reserve(samples.records.size());
  for (const auto& r : samples.records) out.push_back(cost_vector(mode, r.theta, r.hypothesis, params));
  return out;
}

CellCosts accumulate_cell_costs(const GridSpec& spec, const SampleSet& samples,
                                std::span<const std::array<double, kNumHypotheses>> costs) {
  if (costs.size() != samples.records.size()) throw ConfigError("one cost vector per record required");
  CellCosts out{spec, std::vector<std::array<double, kNumHypotheses>>(spec.cell_count()), samples.observations.size()};
  for (std::size_t l = 0; l < samples.records.size(); ++l) {
    for (const auto& z : samples.observations_of(l)) {
      auto& cell = out.sums[spec.cell_of(z)];
      for (std::size_t i = 0; i < cell.size(); ++i) cell[i] += costs[l][i];
    }
  }
  return out;
}

void enforce_simple_connectivity(Grid& grid) {
  // Each pass strictly lowers the total number of label components, so the
  // loop ends; the cap only guards against a logic error.
  for (std::size_t pass = 0; pass <= grid.labels.size(); ++pass) {
    bool changed = false;
    for (std::uint8_t label = 0; label < kNumHypotheses; ++label) {
      auto comps = label_components(grid, label);
      if (comps.size() < 2) continue;
      std::size_t largest = 0;
      for (std::size_t i = 1; i < comps.size(); ++i) {
        if (comps[i].size() > comps[largest].size()) largest = i;
      }
      for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i == largest) continue;
        std::array<std::size_t, kNumHypotheses> votes{};
        for (std::size_t c : comps[i]) {
          for_each_n4(grid, c, [&](std::size_t n) {
            if (grid.labels[n] != label) ++votes[grid.labels[n]];
          });
        }
        const auto fill = static_cast<std::uint8_t>(argmax_lowest(votes));
        for (std::size_t c : comps[i]) grid.labels[c] = fill;
        changed = true;
      }
    }
    for (std::uint8_t label = 0; label < kNumHypotheses; ++label) {
      for (const auto& hole : label_holes(grid, label)) {
        for (std::size_t c : hole) grid.labels[c] = label;
        changed = true;
      }
    }
    if (!changed) return;
  }
  throw ConvergenceError("island removal did not reach a fixpoint");
}

Grid initial_partition(const GridSpec& spec, const SampleSet& samples) {
  spec.validate();
  Grid grid(spec, 0);
  std::vector<std::array<std::size_t, kNumHypotheses>> votes(spec.cell_count());
  std::size_t outside = 0;
  for (std::size_t l = 0; l < samples.records.size(); ++l) {
    const auto h = static_cast<std::size_t>(index(samples.records[l].hypothesis));
    for (const auto& z : samples.observations_of(l)) {
      if (z.d < spec.d_min || z.d > spec.d_max || z.p < spec.p_min || z.p > spec.p_max) ++outside;
      ++votes[spec.cell_of(z)][h];
    }
  }
  if (!samples.observations.empty() &&
      static_cast<double>(outside) > 1e-3 * static_cast<double>(samples.observations.size())) {
    warn("grid covers less than 99.9% of the samples (" + std::to_string(outside) + " outside)");
  }
  std::vector<char> filled(spec.cell_count(), 0);
  bool any = false;
  for (std::size_t c = 0; c < votes.size(); ++c) {
    const auto& v = votes[c];
    if (v[0] + v[1] + v[2] + v[3] == 0) continue;
    grid.labels[c] = static_cast<std::uint8_t>(argmax_lowest(v));
    filled[c] = 1;
    any = true;
  }
  if (any) fill_empty(grid, filled);
  enforce_simple_connectivity(grid);
  return grid;
}

double bayes_risk(const Grid& grid, const SampleSet& samples,
                  std::span<const std::array<double, kNumHypotheses>> costs) {
  if (samples.observations.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t l = 0; l < samples.records.size(); ++l) {
    for (const auto& z : samples.observations_of(l)) {
      total += costs[l][static_cast<std::size_t>(index(grid.decide(z)))];
    }
  }
  return total / static_cast<double>(samples.observations.size());
}

double bayes_risk(const Grid& grid, const SampleSet& samples, CostMode mode, const ThetaCostParams& params) {
  const auto costs = record_costs(samples, mode, params);
  return bayes_risk(grid, samples, costs);
}

RefineResult refine(Grid grid, const CellCosts& costs, const RefineOptions& options) {
  if (!(grid.spec == costs.spec)) throw ConfigError("cost table was built for a different grid");
  if (!all_regions_simply_connected(grid)) throw ConfigError("refine needs simply connected regions");
#ifndef NDEBUG
  const bool check_each = true;
#else
  const bool check_each = options.check_every_mutation;
#endif
  const double norm = costs.n_observations > 0 ? 1.0 / static_cast<double>(costs.n_observations) : 0.0;
  double total = 0.0;
  for (std::size_t c = 0; c < grid.labels.size(); ++c) total += costs.sums[c][grid.labels[c]];

  RefineResult result;
  result.initial_risk = total * norm;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    std::size_t changes = 0;
    for (std::size_t c = 0; c < grid.labels.size(); ++c) {
      const std::uint8_t cur = grid.labels[c];
      std::array<bool, kNumHypotheses> offered{};
      for_each_n4(grid, c, [&](std::size_t n) {
        if (grid.labels[n] != cur) offered[grid.labels[n]] = true;
      });
      int best = -1;
      double best_delta = 0.0;
      for (std::uint8_t cand = 0; cand < kNumHypotheses; ++cand) {
        if (!offered[cand]) continue;
        const double delta = costs.sums[c][cand] - costs.sums[c][cur];
        if (delta < best_delta && relabel_preserves_topology(grid, c, cand)) {
          best = cand;
          best_delta = delta;
        }
      }
      if (best < 0) continue;
      grid.labels[c] = static_cast<std::uint8_t>(best);
      total += best_delta;
      ++changes;
      if (check_each) check_topology(grid, "after relabel");
    }
    check_topology(grid, "after sweep");
    result.risk_history.push_back(total * norm);
    if (options.on_sweep) options.on_sweep(sweep, grid, total * norm);
    if (changes == 0) {
      result.sweeps = sweep;
      result.risk = total * norm;
      result.grid = std::move(grid);
      return result;
    }
  }
  throw ConvergenceError("refinement hit the sweep cap of " + std::to_string(options.max_sweeps));
}

BuildResult build_regions(const PriorConfig& priors, const ChannelConfig& cfg, const GridSpec& spec,
                          std::uint64_t seed, const BuildOptions& options) {
  spec.validate();
  const SampleSet samples = generate_samples(priors, cfg, options.n_p_total, options.n_m, seed, options.observable);
  const auto costs = record_costs(samples, options.cost_mode, options.cost_params);
  const CellCosts table = accumulate_cell_costs(spec, samples, costs);
  RefineResult refined = refine(initial_partition(spec, samples), table, options.refine);
  BuildResult out;
  out.grid = std::move(refined.grid);
  out.seed = seed;
  out.initial_risk = refined.initial_risk;
  out.risk = refined.risk;
  out.sweeps = refined.sweeps;
  out.risk_history = std::move(refined.risk_history);
  return out;
}

}  // namespace pdguard
