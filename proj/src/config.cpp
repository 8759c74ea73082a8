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

#include "pdguard/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pdguard/error.hpp"
#include "pdguard/numfmt.hpp"

namespace pdguard {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

double num(std::string_view key, std::string_view v) {
  const auto x = parse_double(v);
  if (!x || !std::isfinite(*x)) throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  return *x;
}

template <class Int>
Int integer(std::string_view key, std::string_view v) {
  const auto x = parse_int<Int>(v);
  if (!x) throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  return *x;
}

bool boolean(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false");
}

std::vector<double> numbers(std::string_view key, std::string_view v, std::size_t n) {
  const auto parts = split(v, ',');
  if (parts.size() != n) throw ConfigError(std::string(key) + ": expected " + std::to_string(n) + " comma-separated values");
  std::vector<double> out;
  for (auto p : parts) out.push_back(num(key, p));
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

template <class T>
Setter real(T RunConfig::*group, double T::*field) {
  return [=](RunConfig& c, std::string_view k, std::string_view v) { (c.*group).*field = num(k, v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"channel.p_a_dbw", real(&RunConfig::channel, &ChannelConfig::p_a_dbw)},
      {"channel.n0_dbw_hz", real(&RunConfig::channel, &ChannelConfig::n0_dbw_hz)},
      {"channel.m_s", [](RunConfig& c, auto k, auto v) { c.channel.m_s = integer<int>(k, v); }},
      {"channel.tau_c", real(&RunConfig::channel, &ChannelConfig::tau_c)},
      {"channel.accum_t", real(&RunConfig::channel, &ChannelConfig::accum_t)},
      {"channel.tau_d", real(&RunConfig::channel, &ChannelConfig::tau_d)},
      {"channel.tau_dll", real(&RunConfig::channel, &ChannelConfig::tau_dll)},
      {"channel.w_p", real(&RunConfig::channel, &ChannelConfig::w_p)},
      {"channel.sigma_p_db", real(&RunConfig::channel, &ChannelConfig::sigma_p_db)},
      {"priors.pi",
       [](RunConfig& c, auto k, auto v) {
         const auto x = numbers(k, v, kNumHypotheses);
         std::copy(x.begin(), x.end(), c.priors.pi.begin());
       }},
      {"priors.alpha_e", real(&RunConfig::priors, &PriorConfig::alpha_e)},
      {"priors.mp_eta_mean_db", real(&RunConfig::priors, &PriorConfig::mp_eta_mean_db)},
      {"priors.mp_eta_std_db", real(&RunConfig::priors, &PriorConfig::mp_eta_std_db)},
      {"priors.mp_corr", real(&RunConfig::priors, &PriorConfig::mp_corr)},
      {"priors.sp_eta_mean_db", real(&RunConfig::priors, &PriorConfig::sp_eta_mean_db)},
      {"priors.sp_eta_std_db", real(&RunConfig::priors, &PriorConfig::sp_eta_std_db)},
      {"priors.sp_mu_ns", real(&RunConfig::priors, &PriorConfig::sp_mu_ns)},
      {"priors.jam_nu", real(&RunConfig::priors, &PriorConfig::jam_nu)},
      {"priors.jam_sigma", real(&RunConfig::priors, &PriorConfig::jam_sigma)},
      {"priors.jam_dtau_max", real(&RunConfig::priors, &PriorConfig::jam_dtau_max)},
      {"priors.spoofing_case",
       [](RunConfig& c, auto k, auto v) {
         if (v == "coherent") {
           c.observable.spoofing_case = PowerCase::kCoherentEnsemble;
         } else if (v == "noncoherent") {
           c.observable.spoofing_case = PowerCase::kNoncoherentEnsemble;
         } else {
           throw ConfigError(std::string(k) + ": expected coherent or noncoherent");
         }
       }},
      {"build.seed", [](RunConfig& c, auto k, auto v) { c.seed = integer<std::uint64_t>(k, v); }},
      {"build.n_p", [](RunConfig& c, auto k, auto v) { c.n_p = integer<std::size_t>(k, v); }},
      {"build.n_m", [](RunConfig& c, auto k, auto v) { c.n_m = integer<int>(k, v); }},
      {"build.max_sweeps", [](RunConfig& c, auto k, auto v) { c.max_sweeps = integer<int>(k, v); }},
      {"build.cost", [](RunConfig& c, auto, auto v) { c.cost_mode = cost_mode_from(v); }},
      {"build.grid", [](RunConfig& c, auto, auto v) { c.grid = parse_grid(v); }},
      {"cost.lenient_eta_db", real(&RunConfig::cost_params, &ThetaCostParams::lenient_eta_db)},
      {"cost.multipath_error_scale", real(&RunConfig::cost_params, &ThetaCostParams::multipath_error_scale)},
      {"cost.multipath_cost_cap", real(&RunConfig::cost_params, &ThetaCostParams::multipath_cost_cap)},
      {"evaluate.n_p", [](RunConfig& c, auto k, auto v) { c.eval_n_p = integer<std::size_t>(k, v); }},
      {"evaluate.n_m", [](RunConfig& c, auto k, auto v) { c.eval_n_m = integer<int>(k, v); }},
      {"detector.vote",
       [](RunConfig& c, auto k, auto v) {
         const auto parts = split(v, ',');
         if (parts.size() != 2) throw ConfigError(std::string(k) + ": expected m,k");
         c.vote = {integer<int>(k, parts[0]), integer<int>(k, parts[1])};
       }},
      {"detector.channels", [](RunConfig& c, auto k, auto v) { c.n_min = integer<int>(k, v); }},
      {"detector.gate_cn0_drop_db", real(&RunConfig::gate, &GateConfig::cn0_drop_db)},
      {"detector.gate_power_db", real(&RunConfig::gate, &GateConfig::power_anomaly_db)},
      {"ingest.quiet",
       [](RunConfig& c, auto k, auto v) {
         const auto x = numbers(k, v, 2);
         c.quiet = {x[0], x[1]};
       }},
      {"ingest.excise", [](RunConfig& c, auto k, auto v) { c.excise = boolean(k, v); }},
      {"ingest.bin_db", real(&RunConfig::excision, &ExcisionOptions::bin_db)},
      {"ingest.smoothing_bins", [](RunConfig& c, auto k, auto v) { c.excision.smoothing_bins = integer<int>(k, v); }},
      {"ingest.dilation", [](RunConfig& c, auto k, auto v) { c.excision.dilation = integer<int>(k, v); }},
      {"scenario.kind", [](RunConfig& c, auto, auto v) { c.scenario.kind = scenario_kind_from(v); }},
      {"scenario.duration_s", real(&RunConfig::scenario, &ScenarioConfig::duration_s)},
      {"scenario.channels", [](RunConfig& c, auto k, auto v) { c.scenario.channels = integer<int>(k, v); }},
      {"scenario.onset_s", real(&RunConfig::scenario, &ScenarioConfig::onset_s)},
      {"scenario.pulloff_s", real(&RunConfig::scenario, &ScenarioConfig::pulloff_s)},
      {"scenario.pulloff_rate", real(&RunConfig::scenario, &ScenarioConfig::pulloff_rate)},
      {"scenario.spoof_eta", real(&RunConfig::scenario, &ScenarioConfig::spoof_eta)},
      {"scenario.spoof_dtheta", real(&RunConfig::scenario, &ScenarioConfig::spoof_dtheta)},
      {"scenario.jam_eta", real(&RunConfig::scenario, &ScenarioConfig::jam_eta)},
      {"scenario.jam_dtau", real(&RunConfig::scenario, &ScenarioConfig::jam_dtau)},
  };
  return table;
}

}  // namespace

std::string_view cost_mode_name(CostMode mode) { return mode == CostMode::kUniform ? "uniform" : "theta"; }

CostMode cost_mode_from(std::string_view name) {
  if (name == "uniform") return CostMode::kUniform;
  if (name == "theta") return CostMode::kTheta;
  throw ConfigError("cost must be uniform or theta, got '" + std::string(name) + "'");
}

GridSpec parse_grid(std::string_view text) {
  const auto x = numbers("grid", text, 6);
  GridSpec g;
  g.d_min = x[0];
  g.d_max = x[1];
  g.p_min = x[3];
  g.p_max = x[4];
  if (x[2] != std::floor(x[2]) || x[5] != std::floor(x[5])) throw ConfigError("grid cell counts must be integers");
  g.n_d = static_cast<int>(x[2]);
  g.n_p = static_cast<int>(x[5]);
  g.validate();
  return g;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown setting '" + std::string(key) + "'");
  it->second(*this, key, trim(value));
}

void RunConfig::validate() const {
  channel.validate();
  priors.validate();
  grid.validate();
  vote.validate();
  scenario.validate();
  if (n_m < 1 || eval_n_m < 1) throw ConfigError("n_m must be positive");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be positive");
  if (n_min < 1) throw ConfigError("channel vote threshold must be positive");
  if (!(quiet.t1 > quiet.t0)) throw ConfigError("quiet window must be increasing");
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("a seed is required (--seed or build.seed)");
  return *seed;
}

RunConfig load_config(std::istream& in, RunConfig base) {
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    try {
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError("unterminated section header");
        section = std::string(trim(s.substr(1, s.size() - 2)));
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'");
      const auto key = trim(s.substr(0, eq));
      const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
      base.set(full, s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return load_config(in, std::move(base));
}

}  // namespace pdguard
