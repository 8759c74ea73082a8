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

#include "pdguard/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "pdguard/error.hpp"

namespace pdguard {
namespace {

constexpr std::array<std::array<int, 2>, 4> kN4{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
constexpr std::array<std::array<int, 2>, 8> kN8{{{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

template <std::size_t N, class Pred>
std::vector<std::vector<std::size_t>> components(const Grid& grid, const std::array<std::array<int, 2>, N>& nbrs,
                                                 Pred in_set) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  std::vector<char> seen(grid.labels.size(), 0);
  std::vector<std::vector<std::size_t>> out;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < grid.labels.size(); ++start) {
    if (seen[start] || !in_set(start)) continue;
    std::vector<std::size_t> comp;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t c = queue.front();
      queue.pop_front();
      comp.push_back(c);
      const int r = static_cast<int>(c / static_cast<std::size_t>(cols));
      const int k = static_cast<int>(c % static_cast<std::size_t>(cols));
      for (const auto& [dr, dc] : nbrs) {
        const int rr = r + dr;
        const int kk = k + dc;
        if (rr < 0 || rr >= rows || kk < 0 || kk >= cols) continue;
        const std::size_t n = static_cast<std::size_t>(rr) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(kk);
        if (!seen[n] && in_set(n)) {
          seen[n] = 1;
          queue.push_back(n);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

bool on_border(const Grid& grid, std::size_t c) {
  const auto cols = static_cast<std::size_t>(grid.cols());
  const auto r = c / cols;
  const auto k = c % cols;
  return r == 0 || k == 0 || r + 1 == static_cast<std::size_t>(grid.rows()) || k + 1 == cols;
}

// Number of components of the ring cells flagged in `member`, using 4- or
// 8-adjacency between ring cells. With `touching_4` only components holding
// an edge neighbor of the center are counted.
int ring_components(const std::array<bool, 8>& member, bool eight, bool touching_4) {
  std::array<int, 8> parent{};
  for (int i = 0; i < 8; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (int i = 0; i < 8; ++i) {
    if (!member[static_cast<std::size_t>(i)]) continue;
    for (int j = i + 1; j < 8; ++j) {
      if (!member[static_cast<std::size_t>(j)]) continue;
      const int dr = std::abs(kN8[static_cast<std::size_t>(i)][0] - kN8[static_cast<std::size_t>(j)][0]);
      const int dc = std::abs(kN8[static_cast<std::size_t>(i)][1] - kN8[static_cast<std::size_t>(j)][1]);
      const bool adjacent = eight ? std::max(dr, dc) == 1 : dr + dc == 1;
      if (adjacent) parent[static_cast<std::size_t>(find(j))] = find(i);
    }
  }
  std::array<bool, 8> counted{};
  int n = 0;
  for (int i = 0; i < 8; ++i) {
    if (!member[static_cast<std::size_t>(i)]) continue;
    // even ring positions are the edge neighbors N, E, S, W
    if (touching_4 && i % 2 != 0) continue;
    const int root = find(i);
    if (!counted[static_cast<std::size_t>(root)]) {
      counted[static_cast<std::size_t>(root)] = true;
      ++n;
    }
  }
  return n;
}

// p is simple for the set of cells carrying `label` (p itself excluded).
bool is_simple_for(const std::array<int, 8>& ring_labels, int label) {
  std::array<bool, 8> in{};
  std::array<bool, 8> out{};
  for (std::size_t i = 0; i < 8; ++i) {
    in[i] = ring_labels[i] == label;
    out[i] = !in[i];
  }
  return ring_components(in, false, true) == 1 && ring_components(out, true, false) == 1;
}

}  // namespace

void GridSpec::validate() const {
  if (n_d < 16 || n_p < 16) throw ConfigError("grid needs at least 16 cells per axis");
  if (!(d_max > d_min) || !(p_max > p_min)) throw ConfigError("grid ranges must be increasing");
}

int GridSpec::column_of(double d) const {
  const double x = std::floor((d - d_min) / (d_max - d_min) * n_d);
  if (!(x >= 0.0)) return 0;
  return x >= n_d ? n_d - 1 : static_cast<int>(x);
}

int GridSpec::row_of(double p) const {
  const double x = std::floor((p - p_min) / (p_max - p_min) * n_p);
  if (!(x >= 0.0)) return 0;
  return x >= n_p ? n_p - 1 : static_cast<int>(x);
}

std::size_t Grid::count(Hypothesis h) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(index(h))));
}

std::vector<std::vector<std::size_t>> label_components(const Grid& grid, std::uint8_t label) {
  return components(grid, kN4, [&](std::size_t c) { return grid.labels[c] == label; });
}

std::vector<std::vector<std::size_t>> label_holes(const Grid& grid, std::uint8_t label) {
  auto pieces = components(grid, kN8, [&](std::size_t c) { return grid.labels[c] != label; });
  std::erase_if(pieces, [&](const std::vector<std::size_t>& comp) {
    return std::any_of(comp.begin(), comp.end(), [&](std::size_t c) { return on_border(grid, c); });
  });
  return pieces;
}

bool is_simply_connected(const Grid& grid, std::uint8_t label) {
  return label_components(grid, label).size() <= 1 && label_holes(grid, label).empty();
}

bool all_regions_simply_connected(const Grid& grid) {
  for (int h = 0; h < kNumHypotheses; ++h) {
    if (!is_simply_connected(grid, static_cast<std::uint8_t>(h))) return false;
  }
  return true;
}

bool relabel_preserves_topology(const Grid& grid, std::size_t cell, std::uint8_t new_label) {
  const int old_label = grid.labels[cell];
  if (old_label == new_label) return true;
  const int cols = grid.cols();
  const int r = static_cast<int>(cell / static_cast<std::size_t>(cols));
  const int k = static_cast<int>(cell % static_cast<std::size_t>(cols));
  std::array<int, 8> ring{};
  for (std::size_t i = 0; i < 8; ++i) {
    const int rr = r + kN8[i][0];
    const int kk = k + kN8[i][1];
    // outside the grid belongs to every region's complement
    ring[i] = (rr < 0 || rr >= grid.rows() || kk < 0 || kk >= cols) ? -1 : grid.at(rr, kk);
  }
  return is_simple_for(ring, old_label) && is_simple_for(ring, new_label);
}

}  // namespace pdguard
