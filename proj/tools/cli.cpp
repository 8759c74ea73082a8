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

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "pdguard/config.hpp"
#include "pdguard/detector.hpp"
#include "pdguard/error.hpp"
#include "pdguard/ingest.hpp"
#include "pdguard/log.hpp"
#include "pdguard/monitor.hpp"
#include "pdguard/numfmt.hpp"
#include "pdguard/regions.hpp"
#include "pdguard/synth.hpp"

namespace pdguard::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string cost;
  std::string pi;
  std::string grid;
  std::string vote;
  std::string quiet;
  std::optional<int> channels;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key = value configuration file");
  sub->add_option("--seed", c.seed, "random seed (required for simulation)");
  sub->add_option("--cost", c.cost, "uniform|theta");
  sub->add_option("--pi", c.pi, "prior probabilities a,b,c,d");
  sub->add_option("--grid", c.grid, "dmin,dmax,nd,pmin,pmax,np");
  sub->add_option("--vote", c.vote, "m-of-k window rule m,k");
  sub->add_option("--channels", c.channels, "channels that must agree before alarming");
  sub->add_option("--quiet", c.quiet, "noise reference window t0,t1 (s)");
  sub->add_option("--set", c.sets, "extra override section.key=value")->take_all();
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config_file(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.cost.empty()) cfg.set("build.cost", c.cost);
  if (!c.pi.empty()) cfg.set("priors.pi", c.pi);
  if (!c.grid.empty()) cfg.set("build.grid", c.grid);
  if (!c.vote.empty()) cfg.set("detector.vote", c.vote);
  if (!c.quiet.empty()) cfg.set("ingest.quiet", c.quiet);
  if (c.channels) cfg.n_min = *c.channels;
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path.string());
  return f;
}

fs::path meta_path(const fs::path& csv) { return fs::path(csv.string() + ".meta"); }

std::optional<std::uint64_t> read_meta_seed(const fs::path& csv) {
  std::ifstream f(meta_path(csv));
  if (!f) return std::nullopt;
  for (std::string line; std::getline(f, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(' ') + 1);
    if (key == "seed") return parse_int<std::uint64_t>(line.substr(eq + 1));
  }
  return std::nullopt;
}

// "t drop_db" lines with '#' comments.
PowerLog read_cn0_drop(std::istream& in) {
  PowerLog log;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ss(line);
    std::string a;
    std::string b;
    std::string extra;
    if (!(ss >> a)) continue;
    if (!(ss >> b) || (ss >> extra)) throw ParseError("expected 't drop_db'", line_no);
    const auto t = parse_double(a);
    const auto v = parse_double(b);
    if (!t || !v) throw ParseError("bad number", line_no);
    if (!log.times.empty() && !(*t > log.times.back())) throw ParseError("timestamps must increase", line_no);
    log.times.push_back(*t);
    log.dbw.push_back(*v);
  }
  return log;
}

int cmd_sample(const Common& c, const std::string& out_path, std::ostream& out) {
  const RunConfig cfg = resolve(c);
  const auto seed = cfg.require_seed();
  const SampleSet set = generate_samples(cfg.priors, cfg.channel, cfg.n_p, cfg.n_m, seed, cfg.observable);
  {
    auto f = open_out(out_path);
    write_observation_csv_header(f);
    for (std::size_t l = 0; l < set.records.size(); ++l) {
      for (const auto& z : set.observations_of(l)) {
        write_observation_row(f, {set.records[l].hypothesis, set.records[l].theta, z});
      }
    }
  }
  auto meta = open_out(meta_path(out_path));
  meta << "seed = " << seed << "\nn_p = " << cfg.n_p << "\nn_m = " << cfg.n_m << '\n';
  const auto counts = set.counts();
  out << "wrote " << set.observations.size() << " observations to " << out_path << '\n';
  for (auto h : kAllHypotheses) {
    out << hypothesis_label(h) << ": " << counts[static_cast<std::size_t>(index(h))] << " parameter draws\n";
  }
  return kOk;
}

int cmd_build(const Common& c, const std::string& out_path, const std::string& figure, std::ostream& out) {
  const RunConfig cfg = resolve(c);
  BuildOptions opts;
  opts.n_p_total = cfg.n_p;
  opts.n_m = cfg.n_m;
  opts.cost_mode = cfg.cost_mode;
  opts.cost_params = cfg.cost_params;
  opts.cost_params.tau_dll = cfg.channel.tau_dll;
  opts.observable = cfg.observable;
  opts.refine.max_sweeps = cfg.max_sweeps;
  const BuildResult res = build_regions(cfg.priors, cfg.channel, cfg.grid, cfg.require_seed(), opts);
  {
    auto f = open_out(out_path);
    write_regions(f, res.grid, {res.seed, res.risk, res.sweeps});
  }
  if (!figure.empty()) {
    auto f = open_out(figure);
    f << "D,P,label\n";
    for (int r = 0; r < res.grid.rows(); ++r) {
      for (int k = 0; k < res.grid.cols(); ++k) {
        f << format_double(cfg.grid.d_center(k)) << ',' << format_double(cfg.grid.p_center(r)) << ','
          << int{res.grid.at(r, k)} << '\n';
      }
    }
  }
  out << "cost " << cost_mode_name(cfg.cost_mode) << ", seed " << res.seed << '\n';
  out << "initial risk " << format_double(res.initial_risk) << '\n';
  for (std::size_t i = 0; i < res.risk_history.size(); ++i) {
    out << "sweep " << i + 1 << " risk " << format_double(res.risk_history[i]) << '\n';
  }
  out << "final risk " << format_double(res.risk) << " after " << res.sweeps << " sweeps\n";
  for (auto h : kAllHypotheses) out << hypothesis_label(h) << " cells: " << res.grid.count(h) << '\n';
  return kOk;
}

int cmd_evaluate(const Common& c, const std::string& regions_path, const std::string& samples_path,
                 const std::string& out_path, std::ostream& out) {
  const RunConfig cfg = resolve(c);
  RegionMeta meta;
  Grid grid;
  {
    auto f = open_in(regions_path);
    grid = read_regions(f, &meta);
  }
  std::vector<LabeledDecision> decisions;
  if (!samples_path.empty()) {
    auto f = open_in(samples_path);
    const auto rows = read_observation_csv(f);
    if (const auto s = read_meta_seed(samples_path); s && *s == meta.seed) {
      warn("evaluation samples share the regions' training seed; rates will be optimistic (overfit)");
    }
    for (const auto& r : rows) decisions.push_back({r.hypothesis, grid.decide(r.z)});
  } else {
    const auto seed = cfg.require_seed();
    if (seed == meta.seed) warn("evaluation seed equals the training seed; rates will be optimistic (overfit)");
    const SampleSet set = generate_samples(cfg.priors, cfg.channel, cfg.eval_n_p, cfg.eval_n_m, seed, cfg.observable);
    for (std::size_t l = 0; l < set.records.size(); ++l) {
      for (const auto& z : set.observations_of(l)) decisions.push_back({set.records[l].hypothesis, grid.decide(z)});
    }
  }
  const ClassificationMatrix m = classification_matrix(decisions);
  if (out_path.empty()) {
    write_classification_matrix(out, m);
  } else {
    auto f = open_out(out_path);
    write_classification_matrix(f, m);
  }
  auto rate = [](double x) { return format_fixed(x, 4); };
  out << "H0 -> H0: " << rate(m[0][0]) << '\n';
  out << "H0 false alarm (H2|H3): " << rate(m[2][0] + m[3][0]) << '\n';
  out << "H1 -> H2|H3: " << rate(m[2][1] + m[3][1]) << '\n';
  out << "H2 detected (H2|H3): " << rate(m[2][2] + m[3][2]) << '\n';
  out << "H2 -> H2: " << rate(m[2][2]) << '\n';
  out << "H3 -> H3: " << rate(m[3][3]) << '\n';
  return kOk;
}

struct ClassifyPaths {
  std::string regions;
  std::vector<std::string> accum;
  std::string power;
  std::string cn0_drop;
  std::string out = "decisions.csv";
  std::string history = "fig7_history.csv";
  std::string cdf;
  bool excise = false;
};

int cmd_classify(const Common& c, const ClassifyPaths& p, std::ostream& out) {
  RunConfig cfg = resolve(c);
  if (p.excise) cfg.excise = true;
  Grid grid;
  {
    auto f = open_in(p.regions);
    grid = read_regions(f);
  }
  std::vector<AccumulationLog> logs;
  for (const auto& path : p.accum) {
    auto f = open_in(path);
    try {
      logs.push_back(read_accumulation_log(f));
    } catch (const ParseError& e) {
      throw ParseError(path + " " + e.what(), 0);
    }
  }
  PowerLog power;
  {
    auto f = open_in(p.power);
    power = read_power_log(f);
  }
  std::optional<PowerLog> drop;
  if (!p.cn0_drop.empty()) {
    auto f = open_in(p.cn0_drop);
    drop = read_cn0_drop(f);
  }

  MonitorOptions opts;
  opts.ingest.quiet = cfg.quiet;
  opts.ingest.tau_d = cfg.channel.tau_d;
  opts.ingest.excise = cfg.excise;
  opts.ingest.excision = cfg.excision;
  opts.vote = cfg.vote;
  opts.n_min = cfg.n_min;
  opts.gate = cfg.gate;
  const MonitorResult res = monitor(grid, logs, power, opts, drop ? &*drop : nullptr);

  {
    auto f = open_out(p.out);
    write_decision_log_header(f);
    for (const auto& d : res.decisions) write_decision_log_row(f, d);
  }
  if (!p.history.empty()) {
    const HistoryTrace h = cumulative_history(res.decisions);
    auto f = open_out(p.history);
    f << "t,H0,H1,H2,H3\n";
    for (std::size_t k = 0; k < h.time.size(); ++k) {
      f << format_double(h.time[k]);
      for (const auto& tr : h.trace) f << ',' << format_double(tr[k]);
      f << '\n';
    }
  }
  if (!p.cdf.empty()) {
    std::vector<double> rel;
    for (const auto& d : res.decisions) {
      if (d.channel == logs.front().channel) rel.push_back(d.observation.p);
    }
    const PowerCdf cdf = power_cdf(rel, cfg.excision);
    auto f = open_out(p.cdf);
    f << "P,cdf,curvature\n";
    for (std::size_t i = 0; i < cdf.cdf.size(); ++i) {
      f << format_double(cdf.lo + static_cast<double>(i + 1) * cdf.bin) << ',' << format_double(cdf.cdf[i]) << ','
        << format_double(cdf.curvature[i]) << '\n';
    }
    out << "excision threshold: " << (cdf.threshold ? format_double(*cdf.threshold) + " dB" : "none") << '\n';
  }
  out << "sigma_n0 (raw rate): " << format_double(res.sigma_n0_raw) << '\n';
  out << "decisions: " << res.decisions.size() << ", excised: " << res.n_excised
      << ", without power: " << res.n_invalid << '\n';
  std::size_t alarms = 0;
  for (const auto& e : res.events) {
    out << "t=" << format_fixed(e.t, 2) << " alarm " << alarm_label(e.alarm) << '\n';
    alarms += e.alarm != Alarm::kNone;
  }
  out << "alarms raised: " << alarms << '\n';
  return kOk;
}

int cmd_synth(const Common& c, const std::string& scenario, const std::string& out_dir, std::ostream& out) {
  RunConfig cfg = resolve(c);
  if (!scenario.empty()) cfg.set("scenario.kind", scenario);
  const Scenario sc = synthesize(cfg.scenario, cfg.channel, cfg.require_seed(), cfg.observable);
  const fs::path dir(out_dir);
  for (const auto& log : sc.channels) {
    const fs::path path = dir / ("accum_ch" + std::to_string(log.channel) + ".log");
    auto f = open_out(path);
    write_accumulation_log(f, log);
    out << "wrote " << path.string() << '\n';
  }
  {
    auto f = open_out(dir / "power.log");
    write_power_log(f, sc.power);
  }
  out << "wrote " << (dir / "power.log").string() << '\n';
  out << "scenario " << scenario_name(cfg.scenario.kind);
  if (cfg.scenario.kind != ScenarioKind::kClean) out << ", onset " << format_double(cfg.scenario.onset_s) << " s";
  if (cfg.scenario.kind == ScenarioKind::kPullOff) {
    const TimeSpan w = carry_off_window(cfg.scenario, cfg.channel.tau_d);
    out << ", carry-off " << format_double(w.t0) << " to " << format_double(w.t1) << " s";
  }
  out << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ScopedWarningSink sink([&err](std::string_view m) { err << "warning: " << m << '\n'; });
  CLI::App app{"Power-distortion interference detector"};
  app.name(args.empty() ? "pdguard" : args.front());
  app.require_subcommand(1);

  Common common;
  std::string sample_out;
  std::string build_out;
  std::string eval_out;
  std::string synth_out;
  std::string figure;
  std::string regions;
  std::string samples;
  std::string scenario;
  std::optional<std::size_t> n_p;
  std::optional<int> n_m;
  ClassifyPaths classify;

  auto* sample = app.add_subcommand("sample", "simulate training observations to CSV");
  add_common(sample, common);
  sample->add_option("--out", sample_out, "observation CSV")->default_val("fig5_samples.csv");
  sample->add_option("--n-p", n_p, "parameter draws");
  sample->add_option("--n-m", n_m, "observations per draw");

  auto* build = app.add_subcommand("build", "construct decision regions");
  add_common(build, common);
  build->add_option("--out", build_out, "region file")->default_val("regions.pdr");
  build->add_option("--figure", figure, "per-cell CSV of the regions (e.g. fig6_regions.csv)");
  build->add_option("--n-p", n_p, "parameter draws");
  build->add_option("--n-m", n_m, "observations per draw");

  auto* evaluate = app.add_subcommand("evaluate", "classification matrix on a fresh sample set");
  add_common(evaluate, common);
  evaluate->add_option("--regions", regions, "region file")->required();
  evaluate->add_option("--samples", samples, "observation CSV instead of fresh simulation");
  evaluate->add_option("--out", eval_out, "matrix CSV (stdout when absent)");
  evaluate->add_option("--n-p", n_p, "parameter draws");
  evaluate->add_option("--n-m", n_m, "observations per draw");

  auto* cls = app.add_subcommand("classify", "run ingest and detection over recorded logs");
  add_common(cls, common);
  cls->add_option("--regions", classify.regions, "region file")->required();
  cls->add_option("--accum", classify.accum, "accumulation log, one per channel")->required();
  cls->add_option("--power", classify.power, "power log")->required();
  cls->add_option("--cn0-drop", classify.cn0_drop, "C/N0 drop series 't drop_db' for the shadowing gate");
  cls->add_option("--out", classify.out, "decision log CSV")->default_val("decisions.csv");
  cls->add_option("--history", classify.history, "cumulative decision history CSV")->default_val("fig7_history.csv");
  cls->add_option("--cdf", classify.cdf, "power CDF CSV (e.g. fig8_cdf.csv)");
  cls->add_flag("--excise", classify.excise, "drop power-spike epochs before classifying");

  auto* synth = app.add_subcommand("synth", "write synthetic accumulation and power logs");
  add_common(synth, common);
  synth->add_option("--scenario", scenario, "clean|pulloff|jamming");
  synth->add_option("--out", synth_out, "output directory")->default_val(".");

  try {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("pdguard");
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (n_p) common.sets.push_back((evaluate->parsed() ? "evaluate.n_p=" : "build.n_p=") + std::to_string(*n_p));
    if (n_m) common.sets.push_back((evaluate->parsed() ? "evaluate.n_m=" : "build.n_m=") + std::to_string(*n_m));
    if (sample->parsed()) return cmd_sample(common, sample_out, out);
    if (build->parsed()) return cmd_build(common, build_out, figure, out);
    if (evaluate->parsed()) return cmd_evaluate(common, regions, samples, eval_out, out);
    if (cls->parsed()) return cmd_classify(common, classify, out);
    if (synth->parsed()) return cmd_synth(common, scenario, synth_out, out);
  } catch (const VersionError& e) {
    err << "error: " << e.what() << '\n';
    return kVersion;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

}  // namespace pdguard::cli
