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

// Acceptance checks. One PASS/FAIL line per criterion; the exit status is
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pdguard/correlator.hpp"
#include "pdguard/detector.hpp"
#include "pdguard/ingest.hpp"
#include "pdguard/monitor.hpp"
#include "pdguard/observables.hpp"
#include "pdguard/priors.hpp"
#include "pdguard/regions.hpp"
#include "pdguard/synth.hpp"
#include "ks.hpp"

namespace pd = pdguard;
namespace pt = pdguard::testing;

namespace {

constexpr std::uint64_t kTrainSeed = 1;
constexpr std::uint64_t kEvalSeed = 2;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records one check and its numbers.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << x;
  return s.str();
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Default build shared by criteria 1, 5 and 8, with per-sweep checks.
struct DefaultBuild {
  pd::BuildResult result;
  std::string region_file;
  bool risk_tracked_ok = true;
  bool connected_ok = true;
  double seconds = 0.0;
};

DefaultBuild run_default_build() {
  DefaultBuild out;
  pd::BuildOptions opt;
  double last = std::numeric_limits<double>::infinity();
  opt.refine.on_sweep = [&](int, const pd::Grid& g, double risk) {
    out.risk_tracked_ok = out.risk_tracked_ok && risk <= last;
    last = risk;
    out.connected_ok = out.connected_ok && pd::all_regions_simply_connected(g);
  };
  const auto t0 = std::chrono::steady_clock::now();
  out.result = pd::build_regions({}, {}, pd::GridSpec{}, kTrainSeed, opt);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream f;
  pd::write_regions(f, out.result.grid, {out.result.seed, out.result.risk, out.result.sweeps});
  out.region_file = f.str();
  return out;
}

Outcome criterion1(const DefaultBuild& b) {
  Outcome o;
  const auto eval = pd::generate_samples({}, {}, 100000, 20, kEvalSeed);
  std::vector<pd::LabeledDecision> d;
  d.reserve(eval.observations.size());
  for (std::size_t l = 0; l < eval.records.size(); ++l) {
    for (const auto& z : eval.observations_of(l)) d.push_back({eval.records[l].hypothesis, b.result.grid.decide(z)});
  }
  const auto m = pd::classification_matrix(d);
  o.check(m[0][0] >= 0.98, "H0->H0 " + fixed(m[0][0]) + " >= 0.98");
  o.check(m[3][3] >= 0.95, "H3->H3 " + fixed(m[3][3]) + " >= 0.95");
  o.check(m[2][2] + m[3][2] >= 0.88, "H2->H2|H3 " + fixed(m[2][2] + m[3][2]) + " >= 0.88");
  o.check(m[2][1] + m[3][1] <= 0.03, "H1->H2|H3 " + fixed(m[2][1] + m[3][1]) + " <= 0.03");
  o.check(m[2][2] >= 0.80, "H2->H2 " + fixed(m[2][2]) + " >= 0.80");
  o.detail << "; build " << fixed(b.seconds, 1) << " s, " << b.result.sweeps << " sweeps";
  return o;
}

Outcome criterion2() {
  Outcome o;
  const pd::ChannelConfig cfg;
  const pd::ObservationSimulator sim(cfg);
  pd::Rng rng = pd::make_stream(201);
  const pd::PriorConfig priors;
  std::vector<double> d;
  double d2 = 0.0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto z = sim.simulate(pd::sample_theta(pd::Hypothesis::kClean, priors, rng), pd::Hypothesis::kClean, rng);
    d.push_back(z.d);
    d2 += z.d * z.d;
  }
  const double sigma_d2 = 8.0 * cfg.tau_d;
  const double ks = pt::ks_statistic(d, [&](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x * x / sigma_d2); });
  const double p = pt::ks_pvalue(ks, n);
  o.check(p > 0.01, "KS " + fixed(ks, 5) + " p " + fixed(p, 3) + " > 0.01");
  const double emp = d2 / n;
  o.check(std::abs(emp / sigma_d2 - 1.0) <= 0.02, "E[D^2] " + fixed(emp) + " within 2% of " + fixed(sigma_d2, 2));
  return o;
}

// Mean received power written out term by term, independent of the library.
double expected_power_w(const pd::ChannelConfig& cfg, pd::PowerCase pc, const pd::InterferenceParams& th) {
  const double pa = std::pow(10.0, cfg.p_a_dbw / 10.0);
  const double n0 = std::pow(10.0, cfg.n0_dbw_hz / 10.0);
  const double r = std::max(0.0, 1.0 - std::abs(th.delta_tau));
  const double cross = 2.0 * std::sqrt(th.eta) * pa * std::cos(th.delta_theta) * r;
  const double ms = cfg.m_s;
  switch (pc) {
    case pd::PowerCase::kCleanOrSingleTarget:
      return (ms + 1.0) * pa + th.eta * pa + cross + n0 * cfg.w_p;
    case pd::PowerCase::kCoherentEnsemble:
      return (ms + 1.0) * ((1.0 + th.eta) * pa + cross) + n0 * cfg.w_p;
    case pd::PowerCase::kNoncoherentEnsemble:
      return (ms + 1.0) * (1.0 + th.eta) * pa + n0 * cfg.w_p;
  }
  return 0.0;
}

Outcome criterion3() {
  Outcome o;
  const pd::ChannelConfig cfg;
  const pd::ObservationSimulator sim(cfg);
  const double clean_db = 10.0 * std::log10(expected_power_w(cfg, pd::PowerCase::kCleanOrSingleTarget, {}));
  struct Case {
    const char* name;
    pd::Hypothesis h;
    pd::InterferenceParams theta;
    pd::PowerCase pc;
  };
  const Case cases[] = {
      {"clean", pd::Hypothesis::kClean, {0.0, 0.0, 0.0}, pd::PowerCase::kCleanOrSingleTarget},
      {"single", pd::Hypothesis::kMultipath, {0.3, 0.2, 0.7}, pd::PowerCase::kCleanOrSingleTarget},
      {"coherent", pd::Hypothesis::kSpoofing, {3.0, 0.4, 1.0}, pd::PowerCase::kCoherentEnsemble},
      {"noncoherent", pd::Hypothesis::kJamming, {10.0, 5.0, 0.3}, pd::PowerCase::kNoncoherentEnsemble},
  };
  pd::Rng rng = pd::make_stream(301);
  for (const auto& c : cases) {
    double sum = 0.0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) sum += sim.simulate(c.theta, c.h, rng).p;
    const double got = sum / n;
    const double want = 10.0 * std::log10(expected_power_w(cfg, c.pc, c.theta)) - clean_db;
    o.check(std::abs(got - want) <= 0.02, std::string(c.name) + " " + fixed(got) + " vs " + fixed(want));
  }
  // eta = 4, dtheta = pi, dtau = 0: the cross term cancels part of the carried power
  const pd::InterferenceParams null{4.0, 0.0, std::numbers::pi};
  const double cross = 2.0 * std::sqrt(null.eta) * std::cos(null.delta_theta);
  const double coh = pd::case_mean_power(cfg, pd::PowerCase::kCoherentEnsemble, null);
  const double noncoh = pd::case_mean_power(cfg, pd::PowerCase::kNoncoherentEnsemble, null);
  o.check(cross < 0.0 && coh < noncoh, "destructive cross term " + fixed(cross, 2) + ", coherent " +
                                           fixed(10.0 * std::log10(coh / noncoh), 2) + " dB below noncoherent");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const pd::PriorConfig priors;
  pd::Rng rng = pd::make_stream(401);
  std::vector<double> eta_db, dtau;
  for (int i = 0; i < 200000; ++i) {
    const auto th = pd::sample_theta(pd::Hypothesis::kMultipath, priors, rng);
    eta_db.push_back(10.0 * std::log10(th.eta));
    dtau.push_back(th.delta_tau);
  }
  const double m = mean_of(eta_db);
  const double s = sd_of(eta_db);
  const double r = correlation(eta_db, dtau);
  o.check(std::abs(m + 21.0) <= 0.05, "eta mean " + fixed(m, 3) + " dB");
  o.check(std::abs(s - 5.0) <= 0.05, "eta sd " + fixed(s, 3) + " dB");
  o.check(std::abs(r + 0.23) <= 0.02, "corr " + fixed(r, 3));
  const double mu20 = pd::mu_of_elevation(20.0);
  const double mu50 = pd::mu_of_elevation(50.0);
  const double mu80 = pd::mu_of_elevation(80.0);
  o.check(std::abs(mu20 - 90.8) < 1e-9 && std::abs(mu50 - 44.0) < 1e-9 && std::abs(mu80 - 18.8) < 1e-9,
          "mu " + fixed(mu20, 1) + "/" + fixed(mu50, 1) + "/" + fixed(mu80, 1) + " ns");
  return o;
}

Outcome criterion5(const DefaultBuild& a, const DefaultBuild& b) {
  Outcome o;
  const auto& h = a.result.risk_history;
  bool non_increasing = a.result.initial_risk >= (h.empty() ? 0.0 : h.front());
  for (std::size_t i = 1; i < h.size(); ++i) non_increasing = non_increasing && h[i] <= h[i - 1];
  o.check(non_increasing && a.risk_tracked_ok,
          "risk " + fixed(a.result.initial_risk, 6) + " -> " + fixed(a.result.risk, 6) + " non-increasing");
  o.check(a.connected_ok && b.connected_ok, "simply connected at every sweep");
  o.check(a.region_file == b.region_file, "region files byte-identical");

  pd::GridSpec spec;
  spec.n_d = 32;
  spec.n_p = 32;
  const auto samples = pd::generate_samples({}, {}, 20000, 5, 501);
  const auto costs = pd::record_costs(samples, pd::CostMode::kTheta);
  double worst = 0.0;
  pd::RefineOptions opt;
  opt.on_sweep = [&](int, const pd::Grid& g, double risk) {
    const double brute = pd::bayes_risk(g, samples, costs);
    worst = std::max(worst, std::abs(risk - brute) / brute);
  };
  const auto res = pd::refine(pd::initial_partition(spec, samples), pd::accumulate_cell_costs(spec, samples, costs), opt);
  o.check(worst <= 1e-12, "32x32 incremental vs brute " + sci(worst) + " over " + std::to_string(res.sweeps) + " sweeps");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const double mu0 = 6.0, mu3 = 10.0, sd = 1.5;
  pd::SampleSet s;
  s.n_m = 1;
  pd::Rng rng = pd::make_stream(601);
  for (int i = 0; i < 1000000; ++i) {
    const pd::Observation a{mu0 + sd * pd::standard_normal(rng), 6.0 + 3.0 * pd::standard_normal(rng)};
    s.add({{}, pd::Hypothesis::kClean}, std::span(&a, 1));
    const pd::Observation b{mu3 + sd * pd::standard_normal(rng), 6.0 + 3.0 * pd::standard_normal(rng)};
    s.add({{}, pd::Hypothesis::kJamming}, std::span(&b, 1));
  }
  pd::GridSpec spec;
  spec.d_min = 2.0;
  spec.d_max = 14.0;
  spec.n_d = 64;
  spec.p_min = 1.0;
  spec.p_max = 11.0;
  spec.n_p = 32;
  const auto costs = pd::record_costs(s, pd::CostMode::kUniform);
  const auto res = pd::refine(pd::initial_partition(spec, s), pd::accumulate_cell_costs(spec, s, costs));
  // decide H3 where 0.9 p3 > 0.4 p0
  const double d_star = (2.0 * sd * sd * std::log(0.4 / 0.9) + mu3 * mu3 - mu0 * mu0) / (2.0 * (mu3 - mu0));
  const double width = (spec.d_max - spec.d_min) / spec.n_d;
  double worst = 0.0;
  for (int r = 0; r < spec.n_p; ++r) {
    for (int k = 1; k < spec.n_d; ++k) {
      if (res.grid.at(r, k) != res.grid.at(r, k - 1)) {
        worst = std::max(worst, std::abs(spec.d_min + k * width - d_star) / width);
      }
    }
  }
  o.check(worst <= 2.0, "max boundary offset " + fixed(worst, 2) + " cells from D* = " + fixed(d_star, 3));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const pd::ChannelConfig cfg;
  pd::ScenarioConfig sc;
  sc.duration_s = 1000.0;
  sc.channels = 1;
  auto scen = pd::synthesize(sc, cfg, 701);
  pd::IngestOptions opt;
  opt.quiet = {0.0, sc.duration_s};
  const auto res = pd::ingest(scen.channels[0], scen.power, opt);

  const pd::ObservationSimulator sim(cfg);
  pd::Rng rng = pd::make_stream(702);
  const pd::PriorConfig priors;
  std::vector<double> dd, pd_, di, pi;
  for (std::size_t i = 0; i < res.observations.size(); ++i) {
    const auto z = sim.simulate(pd::sample_theta(pd::Hypothesis::kClean, priors, rng), pd::Hypothesis::kClean, rng);
    dd.push_back(z.d);
    pd_.push_back(z.p);
  }
  for (const auto& ob : res.observations) {
    di.push_back(ob.z.d);
    pi.push_back(ob.z.p);
  }
  const double n = static_cast<double>(di.size());
  const double pd_val = pt::ks_pvalue_two_sample(pt::ks_statistic(dd, di), n, n);
  const double pp_val = pt::ks_pvalue_two_sample(pt::ks_statistic(pd_, pi), n, n);
  o.check(di.size() == 10000 && pd_val > 0.01, std::to_string(di.size()) + " epochs, D p " + fixed(pd_val, 3));
  o.check(pp_val > 0.01, "P p " + fixed(pp_val, 3));

  // +3 dB bursts over 5% of the epochs after the quiet window
  std::vector<char> spike(scen.power.dbw.size(), 0);
  for (int b = 0; b < 25; ++b) {
    const auto start = 600 + static_cast<std::size_t>(pd::uniform01(rng) * (spike.size() - 620));
    for (std::size_t i = start; i < start + 20; ++i) spike[i] = 1;
  }
  for (std::size_t i = 0; i < spike.size(); ++i) {
    if (spike[i]) scen.power.dbw[i] += 3.0;
  }
  opt.quiet = {0.0, 60.0};
  opt.excise = true;
  const auto ex = pd::ingest(scen.channels[0], scen.power, opt);
  std::vector<char> kept(spike.size(), 0);
  for (const auto& ob : ex.observations) {
    kept[static_cast<std::size_t>(std::lround(ob.t * 10.0 - 0.45))] = 1;
  }
  std::size_t n_spike = 0, spike_cut = 0, n_clean = 0, clean_cut = 0;
  for (std::size_t i = 0; i < spike.size(); ++i) {
    (spike[i] ? n_spike : n_clean) += 1;
    (spike[i] ? spike_cut : clean_cut) += !kept[i];
  }
  const double recall = static_cast<double>(spike_cut) / n_spike;
  const double loss = static_cast<double>(clean_cut) / n_clean;
  o.check(recall >= 0.9, "spikes excised " + fixed(recall, 3) + " >= 0.9");
  o.check(loss < 0.02, "clean loss " + fixed(loss, 4) + " < 0.02");
  return o;
}

Outcome criterion8(const pd::Grid& grid) {
  Outcome o;
  const pd::ChannelConfig cfg;
  pd::MonitorOptions opt;
  opt.ingest.quiet = {0.0, 60.0};
  const double latency = opt.vote.k * cfg.accum_t;  // time for a window to flush

  pd::ScenarioConfig sc;
  sc.kind = pd::ScenarioKind::kPullOff;
  const auto pull = pd::synthesize(sc, cfg, 801);
  const auto pr = pd::monitor(grid, pull.channels, pull.power, opt);
  const auto window = pd::carry_off_window(sc, cfg.tau_d);
  bool alarm_inside = false;
  bool spoof_outside = false;
  double first_alarm = -1.0;
  for (const auto& e : pr.epochs) {
    if (e.alarm != pd::Alarm::kSpoofing) continue;
    if (window.contains(e.t)) {
      alarm_inside = true;
      if (first_alarm < 0.0) first_alarm = e.t;
    } else if (!(e.t > window.t1 && e.t <= window.t1 + latency)) {
      spoof_outside = true;
    }
  }
  std::size_t outside = 0, outside_ok = 0;
  for (const auto& d : pr.decisions) {
    if (d.gated || window.contains(d.time)) continue;
    ++outside;
    outside_ok += d.decision == pd::Hypothesis::kClean || d.decision == pd::Hypothesis::kJamming;
  }
  const double frac = static_cast<double>(outside_ok) / static_cast<double>(outside);
  o.check(alarm_inside, "pull-off spoofing alarm in [" + fixed(window.t0, 0) + ", " + fixed(window.t1, 0) +
                            "] s from " + fixed(first_alarm, 1) + " s");
  o.check(!spoof_outside, "no spoofing alarm outside it");
  o.check(frac >= 0.95, "H0|H3 outside " + fixed(frac, 4) + " >= 0.95");

  pd::ScenarioConfig jc;
  jc.kind = pd::ScenarioKind::kJamming;
  const auto jam = pd::synthesize(jc, cfg, 802);
  const auto jr = pd::monitor(grid, jam.channels, jam.power, opt);
  double first_jam = -1.0;
  bool early = false;
  for (const auto& e : jr.epochs) {
    if (e.alarm == pd::Alarm::kNone) continue;
    if (e.t < jc.onset_s) early = true;
    if (e.alarm == pd::Alarm::kJamming && first_jam < 0.0) first_jam = e.t;
  }
  o.check(!early && first_jam >= jc.onset_s && first_jam <= jc.onset_s + latency,
          "jamming alarm " + fixed(first_jam - jc.onset_s, 2) + " s after onset");
  return o;
}

void report(int n, const Outcome& o, bool& all) {
  all = all && o.pass;
  std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << std::endl;
}

}  // namespace

int main() {
  bool all = true;
  const DefaultBuild first = run_default_build();
  report(1, criterion1(first), all);
  report(2, criterion2(), all);
  report(3, criterion3(), all);
  report(4, criterion4(), all);
  {
    const DefaultBuild second = run_default_build();
    report(5, criterion5(first, second), all);
  }
  report(6, criterion6(), all);
  report(7, criterion7(), all);
  report(8, criterion8(first.result.grid), all);
  return all ? 0 : 1;
}
