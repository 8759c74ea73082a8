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

#include "pdguard/cost.hpp"

#include <algorithm>
#include <cmath>

#include "pdguard/correlator.hpp"

namespace pdguard {

CostMatrix uniform_cost() {
  CostMatrix m;
  auto& c = m.c;
  c[0][1] = 0.2;
  c[0][2] = c[1][2] = 1.0;
  c[0][3] = c[1][3] = 0.9;
  c[1][0] = 0.1;
  c[2][0] = c[2][1] = c[3][0] = c[3][1] = 0.4;
  c[3][2] = c[2][3] = 0.2;
  return m;
}

double multipath_miss_cost(double e_tau, const ThetaCostParams& params) {
  return std::min(params.multipath_cost_cap, std::abs(e_tau) / params.multipath_error_scale);
}

double theta_cost_given_error(Hypothesis decide, const InterferenceParams& theta, Hypothesis truth, double e_tau,
                              const ThetaCostParams& params) {
  static const CostMatrix base = uniform_cost();
  switch (truth) {
    case Hypothesis::kMultipath:
      if (decide == Hypothesis::kClean) return multipath_miss_cost(e_tau, params);
      break;
    case Hypothesis::kSpoofing: {
      // Unreachable with the default eta_1 = 1 bound, kept for reconfigured bounds.
      const bool lenient = std::abs(theta.delta_tau) < params.tau_dll && theta.eta > 0.0 &&
                           linear_to_db(theta.eta) < params.lenient_eta_db;
      if (lenient && decide == Hypothesis::kClean) return multipath_miss_cost(e_tau, params);
      if (lenient && decide == Hypothesis::kMultipath) return 0.0;
      break;
    }
    case Hypothesis::kJamming:
      if (decide == Hypothesis::kClean || decide == Hypothesis::kMultipath) {
        return std::clamp(linear_to_db(theta.eta) / 10.0, 0.0, base(Hypothesis::kClean, Hypothesis::kJamming));
      }
      break;
    case Hypothesis::kClean:
      break;
  }
  return base(decide, truth);
}

double theta_cost(Hypothesis decide, const InterferenceParams& theta, Hypothesis truth,
                  const ThetaCostParams& params) {
  const double e_tau = std::abs(estimate_code_phase(theta));
  return theta_cost_given_error(decide, theta, truth, e_tau, params);
}

std::array<double, kNumHypotheses> cost_vector(CostMode mode, const InterferenceParams& theta, Hypothesis truth,
                                               const ThetaCostParams& params) {
  std::array<double, kNumHypotheses> out{};
  if (mode == CostMode::kUniform) {
    const auto m = uniform_cost();
    for (auto h : kAllHypotheses) out[index(h)] = m(h, truth);
    return out;
  }
  const bool needs_error = truth == Hypothesis::kMultipath || truth == Hypothesis::kSpoofing;
  const double e_tau = needs_error ? std::abs(estimate_code_phase(theta)) : 0.0;
  for (auto h : kAllHypotheses) out[index(h)] = theta_cost_given_error(h, theta, truth, e_tau, params);
  return out;
}

}  // namespace pdguard
