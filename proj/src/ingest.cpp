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

#include "pdguard/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "pdguard/error.hpp"
#include "pdguard/log.hpp"
#include "pdguard/numfmt.hpp"

namespace pdguard {
namespace {

constexpr double kEdgeSlack = 1e-6;  // s

constexpr std::string_view kAccumMagic = "PDACCUM";
constexpr std::string_view kPowerMagic = "PDPOWER";
constexpr std::string_view kVersion = "v1";

class Tokens {
 public:
  explicit Tokens(std::string_view s) : rest_(s) {}
  bool next(std::string_view& tok) {
    const auto b = rest_.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return false;
    rest_.remove_prefix(b);
    const auto e = std::min(rest_.find_first_of(" \t\r"), rest_.size());
    tok = rest_.substr(0, e);
    rest_.remove_prefix(e);
    return true;
  }

 private:
  std::string_view rest_;
};

double to_double(std::string_view s, std::size_t line) {
  const auto v = parse_double(s);
  if (!v) throw ParseError("bad number '" + std::string(s) + "'", line);
  return *v;
}

std::vector<std::string_view> header_fields(const std::string& line, std::string_view magic, std::size_t n) {
  std::vector<std::string_view> f;
  Tokens tok(line);
  for (std::string_view t; tok.next(t);) f.push_back(t);
  if (f.empty() || f[0] != magic) throw ParseError("expected '" + std::string(magic) + "' header", 1);
  if (f.size() < 2 || f[1] != kVersion) {
    throw VersionError("unsupported " + std::string(magic) + " version " + (f.size() > 1 ? std::string(f[1]) : ""));
  }
  if (f.size() != n) throw ParseError("malformed header", 1);
  return f;
}

void check_increasing(std::span<const double> t, const char* what) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ConfigError(std::string(what) + " timestamps must increase");
  }
}

}  // namespace

void AccumulationLog::append(double t, std::span<const std::complex<double>> rec) {
  if (rec.size() != taps.size()) throw ConfigError("record width does not match the tap count");
  times.push_back(t);
  values.insert(values.end(), rec.begin(), rec.end());
}

void AccumulationLog::validate(double tau_d, std::size_t expected_taps) const {
  if (taps.size() != expected_taps) {
    throw ConfigError("expected " + std::to_string(expected_taps) + " taps, got " + std::to_string(taps.size()));
  }
  if (taps.size() < 3 || taps.size() % 2 == 0) throw ConfigError("tap count must be odd and at least 3");
  const double step = (taps.back() - taps.front()) / static_cast<double>(taps.size() - 1);
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double want = taps.front() + step * static_cast<double>(i);
    if (std::abs(taps[i] - want) > 1e-9 || std::abs(taps[i] + taps[taps.size() - 1 - i]) > 1e-9) {
      throw ConfigError("taps must be uniform and symmetric about 0");
    }
  }
  auto has = [&](double lag) {
    return std::any_of(taps.begin(), taps.end(), [&](double x) { return std::abs(x - lag) < 1e-9; });
  };
  if (!has(0.0) || !has(tau_d) || !has(-tau_d)) throw ConfigError("taps must include 0 and +-tau_d");
  if (values.size() != times.size() * taps.size()) throw ConfigError("value count does not match records");
  if (!(rate_hz > 0.0)) throw ConfigError("rate must be > 0");
  check_increasing(times, "accumulation");
  const double nominal = 1.0 / rate_hz;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - nominal) > 0.01 * nominal) {
      throw ConfigError("accumulation spacing off the nominal rate at record " + std::to_string(i));
    }
  }
}

void PowerLog::validate() const {
  if (times.size() != dbw.size()) throw ConfigError("power log columns differ in length");
  if (!(rate_hz > 0.0) || !(w_p_hz > 0.0)) throw ConfigError("power log rate and bandwidth must be > 0");
  check_increasing(times, "power");
}

void write_accumulation_log(std::ostream& out, const AccumulationLog& log) {
  out << kAccumMagic << ' ' << kVersion << ' ' << log.channel << ' ' << format_double(log.rate_hz) << ' '
      << log.taps.size() << '\n';
  for (std::size_t i = 0; i < log.taps.size(); ++i) out << (i ? " " : "") << format_double(log.taps[i]);
  out << '\n';
  std::string line;
  for (std::size_t r = 0; r < log.size(); ++r) {
    line = format_double(log.times[r]);
    for (const auto& v : log.record(r)) {
      line += ' ';
      line += format_double(v.real());
      line += ':';
      line += format_double(v.imag());
    }
    line += '\n';
    out << line;
  }
}

AccumulationLog read_accumulation_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty accumulation log", 1);
  const auto head = header_fields(line, kAccumMagic, 5);
  AccumulationLog log;
  const auto channel = parse_int<int>(head[2]);
  const auto n_taps = parse_int<std::size_t>(head[4]);
  if (!channel || !n_taps || *n_taps == 0) throw ParseError("bad channel or tap count", 1);
  log.channel = *channel;
  log.rate_hz = to_double(head[3], 1);

  if (!std::getline(in, line)) throw ParseError("missing tap offsets", 2);
  {
    Tokens tok(line);
    for (std::string_view t; tok.next(t);) log.taps.push_back(to_double(t, 2));
    if (log.taps.size() != *n_taps) throw ParseError("tap line has wrong count", 2);
  }
  std::vector<std::complex<double>> rec(*n_taps);
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    Tokens tok(line);
    std::string_view t;
    if (!tok.next(t)) continue;  // blank lines are tolerated
    const double time = to_double(t, line_no);
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (!tok.next(t)) throw ParseError("too few taps", line_no);
      const auto colon = t.find(':');
      if (colon == std::string_view::npos) throw ParseError("tap value must be re:im", line_no);
      rec[i] = {to_double(t.substr(0, colon), line_no), to_double(t.substr(colon + 1), line_no)};
    }
    if (tok.next(t)) throw ParseError("too many taps", line_no);
    if (!log.times.empty() && !(time > log.times.back())) throw ParseError("timestamps must increase", line_no);
    log.append(time, rec);
  }
  return log;
}

void write_power_log(std::ostream& out, const PowerLog& log) {
  out << kPowerMagic << ' ' << kVersion << ' ' << format_double(log.rate_hz) << ' ' << format_double(log.w_p_hz)
      << '\n';
  for (std::size_t i = 0; i < log.times.size(); ++i) {
    out << format_double(log.times[i]) << ' ' << format_double(log.dbw[i]) << '\n';
  }
}

PowerLog read_power_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty power log", 1);
  const auto head = header_fields(line, kPowerMagic, 4);
  PowerLog log;
  log.rate_hz = to_double(head[2], 1);
  log.w_p_hz = to_double(head[3], 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    Tokens tok(line);
    std::string_view a;
    std::string_view b;
    std::string_view extra;
    if (!tok.next(a)) continue;
    if (!tok.next(b) || tok.next(extra)) throw ParseError("expected 't value_dbw'", line_no);
    const double t = to_double(a, line_no);
    if (!log.times.empty() && !(t > log.times.back())) throw ParseError("timestamps must increase", line_no);
    log.times.push_back(t);
    log.dbw.push_back(to_double(b, line_no));
  }
  return log;
}

double estimate_sigma_n0(std::span<const AccumulationLog* const> logs, TimeSpan quiet,
                         const NoiseEstimateOptions& options) {
  if (quiet.t1 - quiet.t0 < options.min_window_s) {
    throw ConfigError("quiet window must span at least " + format_double(options.min_window_s) + " s");
  }
  double outer_ss = 0.0;
  double outer_dof = 0.0;
  double prompt_ss = 0.0;
  double prompt_dof = 0.0;
  // Per-tap, per-component variance around the window mean.
  auto accumulate = [&](const AccumulationLog& log, std::size_t tap, double& ss, double& dof) {
    std::complex<double> sum{};
    std::size_t n = 0;
    for (std::size_t r = 0; r < log.size(); ++r) {
      if (!quiet.contains(log.times[r])) continue;
      sum += log.record(r)[tap];
      ++n;
    }
    if (n < 2) throw ConfigError("quiet window holds fewer than two records");
    const auto mean = sum / static_cast<double>(n);
    for (std::size_t r = 0; r < log.size(); ++r) {
      if (!quiet.contains(log.times[r])) continue;
      const auto d = log.record(r)[tap] - mean;
      ss += d.real() * d.real() + d.imag() * d.imag();
    }
    dof += 2.0 * static_cast<double>(n - 1);
  };
  for (const AccumulationLog* log : logs) {
    const std::size_t n_taps = log->taps.size();
    if (n_taps < static_cast<std::size_t>(options.outer_taps) + 1) throw ConfigError("not enough taps for the noise estimate");
    std::vector<std::size_t> order(n_taps);
    for (std::size_t i = 0; i < n_taps; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(log->taps[a]) > std::abs(log->taps[b]); });
    for (int i = 0; i < options.outer_taps; ++i) accumulate(*log, order[static_cast<std::size_t>(i)], outer_ss, outer_dof);
    accumulate(*log, order.back(), prompt_ss, prompt_dof);
  }
  if (outer_dof == 0.0) throw ConfigError("no logs supplied for the noise estimate");
  const double sigma = std::sqrt(outer_ss / outer_dof);
  const double prompt = std::sqrt(prompt_ss / prompt_dof);
  if (prompt > options.interference_ratio * sigma) {
    throw ConfigError("quiet window shows interference: prompt deviation " + format_double(prompt / sigma) +
                      "x the noise");
  }
  return sigma;
}

double estimate_sigma_n0(const AccumulationLog& log, TimeSpan quiet, const NoiseEstimateOptions& options) {
  const AccumulationLog* one[] = {&log};
  return estimate_sigma_n0(one, quiet, options);
}

AccumulationLog decimate(const AccumulationLog& log, int factor) {
  if (factor < 1) throw ConfigError("decimation factor must be positive");
  const auto f = static_cast<std::size_t>(factor);
  const std::size_t blocks = log.size() / f;
  if (log.size() % f != 0) {
    warn("decimate: dropping " + std::to_string(log.size() % f) + " trailing records");
  }
  AccumulationLog out;
  out.channel = log.channel;
  out.rate_hz = log.rate_hz / factor;
  out.taps = log.taps;
  out.times.reserve(blocks);
  out.values.reserve(blocks * log.taps.size());
  std::vector<std::complex<double>> acc(log.taps.size());
  for (std::size_t b = 0; b < blocks; ++b) {
    std::fill(acc.begin(), acc.end(), std::complex<double>{});
    double t = 0.0;
    for (std::size_t r = b * f; r < (b + 1) * f; ++r) {
      t += log.times[r];
      const auto rec = log.record(r);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += rec[i];
    }
    for (auto& v : acc) v /= static_cast<double>(factor);
    out.append(t / static_cast<double>(factor), acc);
  }
  return out;
}

AlignedPower align_power(const PowerLog& power, std::span<const double> times) {
  AlignedPower out{std::vector<double>(times.size(), 0.0), std::vector<char>(times.size(), 0)};
  const auto& pt = power.times;
  bool any = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (pt.empty()) continue;
    // Timestamps computed two ways may differ by rounding at the ends.
    const double t = times[i];
    if (t < pt.front() - kEdgeSlack || t > pt.back() + kEdgeSlack) continue;
    const double tc = std::clamp(t, pt.front(), pt.back());
    const auto hi = static_cast<std::size_t>(std::lower_bound(pt.begin(), pt.end(), tc) - pt.begin());
    if (pt[hi] == tc) {
      out.dbw[i] = power.dbw[hi];
    } else {
      const double w = (tc - pt[hi - 1]) / (pt[hi] - pt[hi - 1]);
      out.dbw[i] = power.dbw[hi - 1] + w * (power.dbw[hi] - power.dbw[hi - 1]);
    }
    out.valid[i] = 1;
    any = true;
  }
  if (!times.empty() && !any) throw ConfigError("power log does not overlap the accumulation epochs");
  return out;
}

PowerCdf power_cdf(std::span<const double> p, const ExcisionOptions& options) {
  PowerCdf out;
  if (p.empty()) return out;
  if (!(options.bin_db > 0.0) || options.smoothing_bins < 1) throw ConfigError("bad excision binning");
  std::vector<double> sorted(p.begin(), p.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  out.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  out.lo = sorted.front();
  out.bin = options.bin_db;
  const auto n_bins = static_cast<std::size_t>(std::floor((sorted.back() - out.lo) / out.bin)) + 1;
  std::vector<double> hist(n_bins, 0.0);
  for (double x : sorted) {
    hist[std::min(n_bins - 1, static_cast<std::size_t>((x - out.lo) / out.bin))] += 1.0;
  }
  out.cdf.resize(n_bins);
  double run = 0.0;
  for (std::size_t i = 0; i < n_bins; ++i) out.cdf[i] = (run += hist[i]) / static_cast<double>(n);

  std::vector<double> d2(n_bins, 0.0);
  for (std::size_t i = 1; i + 1 < n_bins; ++i) d2[i] = out.cdf[i + 1] - 2.0 * out.cdf[i] + out.cdf[i - 1];
  const auto half = static_cast<std::ptrdiff_t>(options.smoothing_bins / 2);
  out.curvature.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    const auto a = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - half);
    const auto b = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n_bins) - 1, static_cast<std::ptrdiff_t>(i) + half);
    double s = 0.0;
    for (auto j = a; j <= b; ++j) s += d2[static_cast<std::size_t>(j)];
    out.curvature[i] = s / static_cast<double>(b - a + 1);
  }
  const auto start = static_cast<std::size_t>((out.median - out.lo) / out.bin);
  for (std::size_t i = start + 1; i < n_bins; ++i) {
    if (out.curvature[i - 1] < 0.0 && out.curvature[i] >= 0.0) {
      out.threshold = out.lo + static_cast<double>(i) * out.bin;
      break;
    }
  }
  return out;
}

std::vector<char> excise_interference(std::span<const double> p, const ExcisionOptions& options) {
  if (p.size() < options.min_length) {
    throw ConfigError("excision needs at least " + std::to_string(options.min_length) + " epochs");
  }
  std::vector<char> keep(p.size(), 1);
  const PowerCdf cdf = power_cdf(p, options);
  if (!cdf.threshold) {
    warn("excision: no CDF knee found, nothing excised");
    return keep;
  }
  const auto n = static_cast<std::ptrdiff_t>(p.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!(p[static_cast<std::size_t>(i)] > *cdf.threshold)) continue;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - options.dilation);
         j <= std::min(n - 1, i + options.dilation); ++j) {
      if (p[static_cast<std::size_t>(j)] >= cdf.median) keep[static_cast<std::size_t>(j)] = 0;
    }
  }
  return keep;
}

std::vector<TimedObservation> observations_from_log(const AccumulationLog& log, const AlignedPower& power,
                                                    double sigma_n0, double tau_d, TimeSpan quiet,
                                                    std::span<const char> keep) {
  std::vector<TimedObservation> out;
  if (log.size() == 0) return out;
  if (power.dbw.size() != log.size()) throw ConfigError("power series does not match the log");
  if (!keep.empty() && keep.size() != log.size()) throw ConfigError("keep mask does not match the log");
  double ref = 0.0;
  std::size_t n_ref = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (power.valid[i] && quiet.contains(log.times[i])) {
      ref += power.dbw[i];
      ++n_ref;
    }
  }
  if (n_ref == 0) throw ConfigError("no valid power epochs in the quiet window");
  ref /= static_cast<double>(n_ref);

  CorrelationSnapshot snap;
  snap.lags = log.taps;
  snap.values.resize(log.taps.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (!power.valid[i] || (!keep.empty() && !keep[i])) continue;
    const auto rec = log.record(i);
    std::copy(rec.begin(), rec.end(), snap.values.begin());
    out.push_back({log.times[i], {symmetric_difference(snap, tau_d, sigma_n0), power.dbw[i] - ref}});
  }
  return out;
}

IngestResult ingest(const AccumulationLog& raw, const PowerLog& power, double sigma_n0_raw,
                    const IngestOptions& options) {
  raw.validate(options.tau_d);
  power.validate();
  IngestResult out;
  out.sigma_n0_raw = sigma_n0_raw;
  out.sigma_n0 = sigma_n0_raw / std::sqrt(static_cast<double>(options.decimation));
  const AccumulationLog log = decimate(raw, options.decimation);
  out.n_epochs = log.size();
  const AlignedPower aligned = align_power(power, log.times);
  std::vector<char> keep(log.size(), 1);
  if (options.excise) {
    std::vector<double> valid_p;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < log.size(); ++i) {
      if (!aligned.valid[i]) continue;
      valid_p.push_back(aligned.dbw[i]);
      where.push_back(i);
    }
    const auto mask = excise_interference(valid_p, options.excision);
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (!mask[k]) {
        keep[where[k]] = 0;
        ++out.n_excised;
      }
    }
  }
  out.n_invalid = static_cast<std::size_t>(std::count(aligned.valid.begin(), aligned.valid.end(), 0));
  out.observations = observations_from_log(log, aligned, out.sigma_n0, options.tau_d, options.quiet, keep);
  return out;
}

IngestResult ingest(const AccumulationLog& raw, const PowerLog& power, const IngestOptions& options) {
  return ingest(raw, power, estimate_sigma_n0(raw, options.quiet, options.noise), options);
}

}  // namespace pdguard
