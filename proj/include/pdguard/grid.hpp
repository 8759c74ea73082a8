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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pdguard/observables.hpp"
#include "pdguard/types.hpp"

namespace pdguard {

/// Uniform rectangular cells over the (D, P) plane. Rows run along P from
/// p_min, columns along D from d_min.
struct GridSpec {
  double d_min = 0.0;
  double d_max = 30.0;
  int n_d = 300;
  double p_min = -2.0;
  double p_max = 15.0;
  int n_p = 170;

  void validate() const;

  std::size_t cell_count() const { return static_cast<std::size_t>(n_d) * static_cast<std::size_t>(n_p); }
  int column_of(double d) const;  // clamped to the border
  int row_of(double p) const;     // clamped to the border
  std::size_t cell_of(const Observation& z) const {
    return static_cast<std::size_t>(row_of(z.p)) * static_cast<std::size_t>(n_d) +
           static_cast<std::size_t>(column_of(z.d));
  }
  double d_center(int column) const { return d_min + (column + 0.5) * (d_max - d_min) / n_d; }
  double p_center(int row) const { return p_min + (row + 0.5) * (p_max - p_min) / n_p; }

  bool operator==(const GridSpec&) const = default;
};

/// Decision regions: one hypothesis label per cell, row-major.
struct Grid {
  GridSpec spec;
  std::vector<std::uint8_t> labels;

  Grid() = default;
  Grid(const GridSpec& s, std::uint8_t fill) : spec(s), labels(s.cell_count(), fill) {}

  int rows() const { return spec.n_p; }
  int cols() const { return spec.n_d; }
  std::uint8_t at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(spec.n_d) + static_cast<std::size_t>(col)];
  }
  std::uint8_t& at(int row, int col) {
    return labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(spec.n_d) + static_cast<std::size_t>(col)];
  }

  /// Cell lookup with border clamping.
  Hypothesis decide(const Observation& z) const { return static_cast<Hypothesis>(labels[spec.cell_of(z)]); }

  std::size_t count(Hypothesis h) const;

  bool operator==(const Grid&) const = default;
};

// Region topology. Each label's cells must form one 4-connected set with no
// holes, where a hole is an 8-connected piece of the label's complement that
// cannot reach the outside of the grid.

/// 4-connected components of `label`, each listed in row-major discovery
/// order; components are ordered by their first cell.
std::vector<std::vector<std::size_t>> label_components(const Grid& grid, std::uint8_t label);

/// 8-connected complement components of `label` that do not touch the border.
std::vector<std::vector<std::size_t>> label_holes(const Grid& grid, std::uint8_t label);

bool is_simply_connected(const Grid& grid, std::uint8_t label);
bool all_regions_simply_connected(const Grid& grid);

/// Local test: relabeling `cell` to `new_label` keeps both the losing and
/// the gaining region's topology (components and holes) unchanged. The cell
/// must be a simple point of both regions in the (4, 8) digital topology.
bool relabel_preserves_topology(const Grid& grid, std::size_t cell, std::uint8_t new_label);

}  // namespace pdguard
