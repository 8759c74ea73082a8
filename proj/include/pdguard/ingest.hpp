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

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pdguard/observables.hpp"

namespace pdguard {

/// Complex accumulations of one channel, stored record-major.
struct AccumulationLog {
  int channel = 0;
  double rate_hz = 100.0;
  std::vector<double> taps;
  std::vector<double> times;
  std::vector<std::complex<double>> values;  // times.size() * taps.size()

  std::size_t size() const { return times.size(); }
  std::span<const std::complex<double>> record(std::size_t i) const {
    return {values.data() + i * taps.size(), taps.size()};
  }
  void append(double t, std::span<const std::complex<double>> rec);

  /// Taps uniform, symmetric, containing 0 and +-tau_d, `expected_taps` of
  /// them; timestamps strictly increasing at the nominal rate +-1%.
  void validate(double tau_d, std::size_t expected_taps = 41) const;
};

struct PowerLog {
  double rate_hz = 5.0;
  double w_p_hz = 2.0e6;
  std::vector<double> times;
  std::vector<double> dbw;

  void validate() const;
};

void write_accumulation_log(std::ostream& out, const AccumulationLog& log);
/// Throws ParseError with the offending line, VersionError on a version mismatch.
AccumulationLog read_accumulation_log(std::istream& in);
void write_power_log(std::ostream& out, const PowerLog& log);
PowerLog read_power_log(std::istream& in);

struct TimeSpan {
  double t0 = 0.0;
  double t1 = 0.0;
  bool contains(double t) const { return t >= t0 && t <= t1; }
};

struct NoiseEstimateOptions {
  int outer_taps = 8;               // the taps farthest from the prompt
  double min_window_s = 10.0;
  double interference_ratio = 1.5;  // prompt/outer deviation that flags a busy window
};

/// Pooled per-component deviation of the outer taps over `quiet`, after
/// removing each tap's mean. Throws ConfigError when the window is too short
/// or the prompt tap fluctuates beyond the noise, i.e. interference is present.
double estimate_sigma_n0(std::span<const AccumulationLog* const> logs, TimeSpan quiet,
                         const NoiseEstimateOptions& options = {});
double estimate_sigma_n0(const AccumulationLog& log, TimeSpan quiet, const NoiseEstimateOptions& options = {});

/// Block means of `factor` records, stamped at the block centers. A trailing
/// partial block is dropped with a warning.
AccumulationLog decimate(const AccumulationLog& log, int factor = 10);

struct AlignedPower {
  std::vector<double> dbw;
  std::vector<char> valid;  // false outside the power log's span
};

/// Linear interpolation in dB at `times`. Throws ConfigError when no epoch
/// falls inside the power log.
AlignedPower align_power(const PowerLog& power, std::span<const double> times);

struct ExcisionOptions {
  double bin_db = 0.05;
  int smoothing_bins = 5;
  int dilation = 2;
  std::size_t min_length = 1000;
};

/// Binned CDF of a power series and its smoothed second difference.
struct PowerCdf {
  double lo = 0.0;
  double bin = 0.0;
  std::vector<double> cdf;     // at the upper edge of each bin
  std::vector<double> curvature;
  double median = 0.0;
  std::optional<double> threshold;
};

PowerCdf power_cdf(std::span<const double> p, const ExcisionOptions& options = {});

/// Keep-mask excluding power spikes above the CDF knee past the median. The
/// knee is where the smoothed second difference turns from negative to
/// non-negative, i.e. the valley between the nominal lobe and the spikes.
/// Exclusions are widened by `dilation` epochs but never reach epochs below
/// the median.
std::vector<char> excise_interference(std::span<const double> p, const ExcisionOptions& options = {});

struct TimedObservation {
  double t = 0.0;
  Observation z;
};

/// D from the +-tau_d taps of each record, P as the aligned power minus its
/// mean over `quiet`. Records with invalid power or a cleared `keep` entry
/// are omitted.
std::vector<TimedObservation> observations_from_log(const AccumulationLog& log, const AlignedPower& power,
                                                    double sigma_n0, double tau_d, TimeSpan quiet,
                                                    std::span<const char> keep = {});

struct IngestOptions {
  TimeSpan quiet;
  double tau_d = 0.15;
  int decimation = 10;
  bool excise = false;
  NoiseEstimateOptions noise;
  ExcisionOptions excision;
};

struct IngestResult {
  double sigma_n0_raw = 0.0;  // at the logged rate
  double sigma_n0 = 0.0;      // after decimation
  std::vector<TimedObservation> observations;
  std::size_t n_epochs = 0;
  std::size_t n_invalid = 0;
  std::size_t n_excised = 0;
};

/// Full chain for one channel: noise reference, decimation, power alignment,
/// optional excision, observation extraction.
IngestResult ingest(const AccumulationLog& raw, const PowerLog& power, const IngestOptions& options);
/// Same chain with the noise reference already known (at the logged rate).
IngestResult ingest(const AccumulationLog& raw, const PowerLog& power, double sigma_n0_raw,
                    const IngestOptions& options);

}  // namespace pdguard
