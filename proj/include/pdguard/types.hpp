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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace pdguard {

/// H0..H3. The underlying value is the hypothesis index used in files.
enum class Hypothesis : std::uint8_t { kClean = 0, kMultipath = 1, kSpoofing = 2, kJamming = 3 };

inline constexpr int kNumHypotheses = 4;
inline constexpr std::array<Hypothesis, kNumHypotheses> kAllHypotheses{
    Hypothesis::kClean, Hypothesis::kMultipath, Hypothesis::kSpoofing, Hypothesis::kJamming};

constexpr int index(Hypothesis h) { return static_cast<int>(h); }
Hypothesis hypothesis_from_index(int i);  // throws ConfigError outside 0..3
std::string_view hypothesis_label(Hypothesis h);  // "H0".."H3"

/// Interference description shared by all hypotheses: power advantage
/// (linear), code offset in chips (signed) and carrier offset in radians.
struct InterferenceParams {
  double eta = 0.0;
  double delta_tau = 0.0;
  double delta_theta = 0.0;
};

/// Validates eta >= 0 and wraps delta_theta into [0, 2*pi).
InterferenceParams make_interference(double eta, double delta_tau, double delta_theta);

double wrap_phase(double radians);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace pdguard
