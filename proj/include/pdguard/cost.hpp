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

#include "pdguard/priors.hpp"
#include "pdguard/types.hpp"

namespace pdguard {

/// c[i][j]: cost of deciding H_i when H_j is true.
struct CostMatrix {
  std::array<std::array<double, kNumHypotheses>, kNumHypotheses> c{};

  double operator()(Hypothesis decide, Hypothesis truth) const { return c[index(decide)][index(truth)]; }
};

CostMatrix uniform_cost();

enum class CostMode { kUniform, kTheta };

struct ThetaCostParams {
  double tau_dll = 0.15;            // tracking tap offset, chips
  double lenient_eta_db = -1.0;     // close-in spoofing weaker than this is priced like multipath
  double multipath_error_scale = 0.3;
  double multipath_cost_cap = 0.8;
};

/// Cost of missing multipath with code-phase error `e_tau` (chips).
double multipath_miss_cost(double e_tau, const ThetaCostParams& params = {});

/// Theta-dependent cost with the code-phase error supplied by the caller.
double theta_cost_given_error(Hypothesis decide, const InterferenceParams& theta, Hypothesis truth, double e_tau,
                              const ThetaCostParams& params = {});

/// Theta-dependent cost; e_tau comes from estimate_code_phase(theta).
double theta_cost(Hypothesis decide, const InterferenceParams& theta, Hypothesis truth,
                  const ThetaCostParams& params = {});

/// Costs of all four decisions for one parameter draw.
std::array<double, kNumHypotheses> cost_vector(CostMode mode, const InterferenceParams& theta, Hypothesis truth,
                                               const ThetaCostParams& params = {});

}  // namespace pdguard
