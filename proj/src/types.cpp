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

#include "pdguard/types.hpp"

#include <string>

#include "pdguard/error.hpp"

namespace pdguard {

Hypothesis hypothesis_from_index(int i) {
  if (i < 0 || i >= kNumHypotheses) {
    throw ConfigError("hypothesis index out of range: " + std::to_string(i));
  }
  return static_cast<Hypothesis>(i);
}

std::string_view hypothesis_label(Hypothesis h) {
  static constexpr std::array<std::string_view, kNumHypotheses> kLabels{"H0", "H1", "H2", "H3"};
  return kLabels[index(h)];
}

double wrap_phase(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below 0 can land exactly on 2*pi after the shift
  return r >= kTwoPi ? 0.0 : r;
}

InterferenceParams make_interference(double eta, double delta_tau, double delta_theta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be finite and >= 0");
  if (!std::isfinite(delta_tau) || !std::isfinite(delta_theta)) {
    throw ConfigError("interference offsets must be finite");
  }
  return {eta, delta_tau, wrap_phase(delta_theta)};
}

}  // namespace pdguard
