// Copyright 2026 The pastq Authors
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

#include "pastq_cli/cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pastq/pastq.hpp"

namespace pastq::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  bool quiet = false;
};

struct Context {
  Options opt;
  json config;
  fs::path config_dir;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;

  void say(const std::string& line) const {
    if (!opt.quiet) out << line << '\n';
  }
  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : config_dir / path;
  }
};

enum class ScenarioKind { kRabiSpin, kJumpingAtom };

struct Scenario {
  ScenarioKind kind = ScenarioKind::kRabiSpin;
  ScenarioConfig cfg;
  Model model;
  DensityMatrix rho0;
  json echo;  ///< effective configuration written into every output
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::kSchemaError, msg); }

Scenario load_scenario(const Context& ctx, const ScenarioConfig& base) {
  if (!ctx.config.contains("model") || !ctx.config.at("model").is_string()) {
    config_error("config needs \"model\": \"rabi-spin\" or \"jumping-atom\"");
  }
  const auto name = ctx.config.at("model").get<std::string>();
  Scenario s;
  s.cfg = io::scenario_from_json(ctx.config.value("parameters", json::object()), base);
  if (ctx.opt.seed) s.cfg.seed = *ctx.opt.seed;
  s.cfg.grid.n_steps();  // validates the grid
  if (name == "rabi-spin") {
    s.kind = ScenarioKind::kRabiSpin;
    s.model = build_rabi_spin(s.cfg.chi, s.cfg.k, s.cfg.eta);
    s.rho0 = rabi_initial_state();
  } else if (name == "jumping-atom") {
    s.kind = ScenarioKind::kJumpingAtom;
    s.model = build_jumping_atom(s.cfg);
    s.rho0 = jumping_atom_initial_state();
  } else {
    config_error("unknown model '" + name + "'");
  }
  s.echo = {{"model", name}, {"parameters", io::scenario_to_json(s.cfg)}};
  if (s.kind == ScenarioKind::kJumpingAtom) {
    const auto warnings = jumping_atom_warnings(s.cfg);
    if (!warnings.empty()) s.echo["warnings"] = warnings;
  }
  return s;
}

void prepare_out_dir(const Context& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create output directory " + ctx.out_dir.string() + ": " + ec.message());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string optional_double(const std::optional<double>& x) { return x ? io::format_double(*x) : "nan"; }

// ---------------------------------------------------------------------------
// Observables by name

struct NamedObservable {
  std::string name;  ///< file-safe
  Operator op;
};

NamedObservable observable(const std::string& name, ScenarioKind kind) {
  if (kind == ScenarioKind::kRabiSpin) {
    const auto axis = parse_pauli_axis(name);
    if (!axis) config_error("unknown rabi-spin observable '" + name + "' (use x, y, z, plus, minus)");
    std::string safe = name == "+" ? "plus" : name == "-" ? "minus" : name;
    return {safe, pauli(*axis)};
  }
  if (name == "site_a") return {name, site_projector(0)};
  if (name == "site_b") return {name, site_projector(1)};
  if (name == "excited") {
    Operator p = Operator::Zero(4, 4);
    p(0, 0) = 1.0;
    p(2, 2) = 1.0;
    return {name, p};
  }
  config_error("unknown jumping-atom observable '" + name + "' (use site_a, site_b, excited)");
}

std::vector<NamedObservable> observables(const Context& ctx, ScenarioKind kind) {
  std::vector<std::string> names{kind == ScenarioKind::kRabiSpin ? "z" : "site_b"};
  if (ctx.config.contains("observables")) {
    try {
      names = ctx.config.at("observables").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      config_error(std::string("'observables' must be a list of names: ") + e.what());
    }
  }
  std::vector<NamedObservable> out;
  for (const auto& n : names) out.push_back(observable(n, kind));
  return out;
}

std::vector<Interruption> interruptions(const Context& ctx, const Model& model) {
  std::vector<Interruption> out;
  if (!ctx.config.contains("interruptions")) return out;
  std::vector<double> times;
  try {
    times = ctx.config.at("interruptions").get<std::vector<double>>();
  } catch (const json::exception& e) {
    config_error(std::string("'interruptions' must be a list of times: ") + e.what());
  }
  for (double t : times) out.push_back({t, model.pointer_projectors});
  return out;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_simulate(const Context& ctx) {
  const Scenario s = load_scenario(ctx, ScenarioConfig{});
  const double t_end = s.cfg.grid.t_end;
  const double dt = s.cfg.grid.dt;
  prepare_out_dir(ctx);

  MeasurementRecord record;
  StateTrajectory traj;
  std::optional<HiddenTruth> truth;
  if (s.kind == ScenarioKind::kRabiSpin) {
    auto sample = sample_diffusive_record(s.model, s.rho0, t_end, dt, s.cfg.seed);
    record = std::move(sample.record);
    traj = std::move(sample.trajectory);
  } else {
    auto sample = sample_jump_record(s.model, s.rho0, t_end, dt, s.cfg.seed);
    record = std::move(sample.record);
    traj = std::move(sample.trajectory);
    truth = std::move(sample.truth);
  }

  io::save_record(ctx.out_dir / "record.csv", ctx.out_dir / "record.json", record, s.echo);
  std::ostringstream states;
  io::write_trajectory_csv(states, traj);
  io::write_text_file(ctx.out_dir / "filtered_states.csv", states.str());
  if (truth) {
    std::ostringstream csv;
    csv << "step,t,site\n";
    for (std::size_t i = 0; i < truth->site.size(); ++i) {
      csv << i << ',' << io::format_double(static_cast<double>(i) * dt) << ',' << truth->site[i] << '\n';
    }
    io::write_text_file(ctx.out_dir / "truth.csv", csv.str());
  }

  std::ostringstream line;
  line << "simulate: " << record.n_steps << " steps";
  if (record.kind == RecordKind::kCounting) {
    std::size_t clicks = 0;
    for (const auto& ch : record.counting_increments) {
      for (int n : ch) clicks += static_cast<std::size_t>(n);
    }
    line << ", " << clicks << " clicks";
  }
  line << " -> " << ctx.out_dir.string();
  ctx.say(line.str());
}

void cmd_smooth(const Context& ctx) {
  const Scenario s = load_scenario(ctx, ScenarioConfig{});
  fs::path csv_path = ctx.out_dir / "record.csv";
  fs::path json_path = ctx.out_dir / "record.json";
  if (ctx.config.contains("record")) {
    const auto& r = ctx.config.at("record");
    if (!r.is_object() || !r.contains("csv") || !r.contains("metadata")) {
      config_error("'record' must be an object with \"csv\" and \"metadata\" paths");
    }
    csv_path = ctx.resolve(r.at("csv").get<std::string>());
    json_path = ctx.resolve(r.at("metadata").get<std::string>());
  }
  const MeasurementRecord record = io::load_record(csv_path, json_path);
  const auto obs = observables(ctx, s.kind);
  const auto cuts = interruptions(ctx, s.model);
  const PastTrajectory traj = smooth(record, s.model, s.rho0, cuts);
  prepare_out_dir(ctx);

  std::size_t gaps = 0;
  for (const auto& o : obs) {
    std::ostringstream csv;
    csv << "t,forward_mean,weak_re,weak_im\n";
    for (const auto& p : expectation_series(traj, o.op)) {
      csv << io::format_double(p.t) << ',' << io::format_double(p.forward_mean) << ',';
      if (p.weak_value) {
        csv << io::format_double(p.weak_value->real()) << ',' << io::format_double(p.weak_value->imag()) << '\n';
      } else {
        csv << "nan,nan\n";
        ++gaps;
      }
    }
    io::write_text_file(ctx.out_dir / ("series_" + o.name + ".csv"), csv.str());
  }

  if (s.kind == ScenarioKind::kJumpingAtom) {
    const MeasurementSpec sites = projective_spec(s.model.pointer_projectors);
    std::ostringstream csv;
    csv << "t,filtered_p_b,smoothed_p_b\n";
    for (const auto& pair : traj.pairs) {
      std::optional<double> smoothed;
      try {
        smoothed = past_distribution(pair, sites)[1];
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegeneratePastState) throw;
      }
      csv << io::format_double(pair.time) << ',' << io::format_double(born_distribution(pair.rho, sites)[1]) << ','
          << optional_double(smoothed) << '\n';
    }
    io::write_text_file(ctx.out_dir / "site_probability.csv", csv.str());
  }

  json meta = s.echo;
  meta["command"] = "smooth";
  meta["record"] = io::record_metadata(record, io::read_json_file(json_path).value("scenario", json::object()));
  meta["observables"] = json::array();
  for (const auto& o : obs) meta["observables"].push_back(o.name);
  meta["interruptions"] = json::array();
  for (const auto& c : cuts) meta["interruptions"].push_back(c.time);
  meta["weak_value_gaps"] = gaps;
  io::write_text_file(ctx.out_dir / "smooth_metadata.json", dump(meta));
  ctx.say("smooth: " + std::to_string(traj.size()) + " grid points, " + std::to_string(obs.size()) +
          " observable(s) -> " + ctx.out_dir.string());
}

json histogram_json(const Histogram& h) {
  json bins = json::array();
  for (std::size_t b = 0; b < kHistogramBins; ++b) bins.push_back(h[b]);
  return bins;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    csv << io::format_double(static_cast<double>(b) / kHistogramBins) << ','
        << io::format_double(static_cast<double>(b + 1) / kHistogramBins) << ',' << h[b] << '\n';
  }
  return csv.str();
}

void cmd_game(const Context& ctx) {
  const Scenario s = load_scenario(ctx, GameConfig::default_game_scenario());
  if (s.kind != ScenarioKind::kRabiSpin) {
    throw Error(ErrorKind::kInvalidParameter, "the guessing game needs the rabi-spin model");
  }
  GameConfig cfg;
  cfg.scenario = s.cfg;
  cfg.base_seed = s.cfg.seed;
  cfg.t0 = 0.5 * s.cfg.grid.t_end;
  const json game = ctx.config.value("game", json::object());
  if (!game.is_object()) config_error("'game' must be an object");
  try {
    cfg.t0 = game.value("t0", cfg.t0);
    cfg.n_trajectories = game.value("n_trajectories", cfg.n_trajectories);
    cfg.threads = game.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    config_error(std::string("'game': ") + e.what());
  }
  if (ctx.opt.n) cfg.n_trajectories = *ctx.opt.n;
  prepare_out_dir(ctx);

  const GameReport r = guessing_game(cfg);
  json report = s.echo;
  report["command"] = "game";
  report["seed"] = cfg.base_seed;
  report["t0"] = cfg.t0;
  report["n"] = r.n;
  report["completed"] = r.completed;
  report["failures"] = r.failures;
  report["forward_accuracy"] = r.forward_accuracy;
  report["past_accuracy"] = r.past_accuracy;
  report["forward_ties"] = r.forward_ties;
  report["past_ties"] = r.past_ties;
  report["forward_log_score"] = {{"mean", r.forward_log_score}, {"se", r.forward_log_score_se}};
  report["past_log_score"] = {{"mean", r.past_log_score}, {"se", r.past_log_score_se}};
  report["log_score_difference_se"] = r.log_score_difference_se;
  report["histogram_bins"] = kHistogramBins;
  report["forward_histogram"] = histogram_json(r.forward_histogram);
  report["past_histogram"] = histogram_json(r.past_histogram);
  io::write_text_file(ctx.out_dir / "game_report.json", dump(report));
  io::write_text_file(ctx.out_dir / "histogram_forward.csv", histogram_csv(r.forward_histogram));
  io::write_text_file(ctx.out_dir / "histogram_past.csv", histogram_csv(r.past_histogram));

  std::ostringstream line;
  line.precision(4);
  line << std::fixed << "game: n = " << r.n << ", forward accuracy " << r.forward_accuracy << ", past accuracy "
       << r.past_accuracy << " -> " << ctx.out_dir.string();
  ctx.say(line.str());
}

int cmd_hmm_check(const Context& ctx) {
  if (!ctx.config.contains("hmm")) config_error("config needs \"hmm\": a model object or a path to one");
  json hmm = ctx.config.at("hmm");
  if (hmm.is_string()) hmm = io::read_json_file(ctx.resolve(hmm.get<std::string>()));
  const HmmModel model = io::hmm_from_json(hmm);
  const Observations obs = io::observations_from_json(ctx.config.contains("observations") ? ctx.config : hmm);
  constexpr double kTolerance = 1e-10;
  const HmmCheckReport r = hmm_check(model, obs, kTolerance);
  prepare_out_dir(ctx);

  json report{{"command", "hmm-check"},
              {"n_states", model.n_states()},
              {"n_symbols", model.n_symbols()},
              {"n_observations", obs.size()},
              {"tolerance", kTolerance},
              {"alpha_deviation", r.alpha_deviation},
              {"beta_deviation", r.beta_deviation},
              {"smoothed_deviation", r.smoothed_deviation},
              {"log_scale_deviation", r.log_scale_deviation},
              {"offdiagonal", r.offdiagonal},
              {"likelihood_deviation", r.likelihood_deviation},
              {"pass", r.pass},
              {"model", io::hmm_to_json(model)},
              {"observations", obs}};
  io::write_text_file(ctx.out_dir / "hmm_check.json", dump(report));
  ctx.say(std::string("hmm-check: ") + (r.pass ? "pass" : "FAIL") + " -> " + ctx.out_dir.string());
  return r.pass ? kExitOk : kExitNumerical;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kIncompleteMeasurement:
    case ErrorKind::kNonOrthogonalProjectors:
    case ErrorKind::kFingerprintMismatch:
    case ErrorKind::kSchemaError:
      return kExitConfig;
    case ErrorKind::kIoError:
      return kExitIo;
    case ErrorKind::kZeroProbabilityOutcome:
    case ErrorKind::kDegeneratePastState:
    case ErrorKind::kStepTooLarge:
    case ErrorKind::kNonFiniteIncrement:
    case ErrorKind::kImpossibleObservation:
    case ErrorKind::kTooLargeForEnumeration:
    case ErrorKind::kTrajectoryFailures:
      return kExitNumerical;
  }
  return kExitNumerical;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Past quantum state smoothing for continuously monitored quantum systems", "pastq"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "Run configuration (JSON)")->required();
    cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "Override the seed from the configuration");
    cmd->add_flag("--quiet", opt.quiet, "Suppress progress output");
    return cmd;
  };
  auto* simulate = add_common(app.add_subcommand("simulate", "Sample a measurement record and its filtered states"));
  auto* smooth_cmd = add_common(app.add_subcommand("smooth", "Forward-backward smoothing of a stored record"));
  auto* game = add_common(app.add_subcommand("game", "Run the retrodiction guessing game"));
  game->add_option("--n", opt.n, "Override the number of trajectories");
  auto* hmm = add_common(app.add_subcommand("hmm-check", "Check the quantum embedding of a classical HMM"));

  std::vector<const char*> argv{"pastq"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "UsageError", e.what(), kExitConfig);
    return kExitConfig;
  }

  try {
    const fs::path config_path(opt.config);
    Context ctx{opt, io::read_json_file(config_path), config_path.parent_path(), fs::path(opt.out), out, err};
    if (!ctx.config.is_object()) config_error("configuration must be a JSON object");
    if (simulate->parsed()) {
      cmd_simulate(ctx);
    } else if (smooth_cmd->parsed()) {
      cmd_smooth(ctx);
    } else if (game->parsed()) {
      cmd_game(ctx);
    } else if (hmm->parsed()) {
      return cmd_hmm_check(ctx);
    }
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    print_error(err, std::string(to_string(e.kind())), e.what(), code);
    return code;
  } catch (const json::exception& e) {
    print_error(err, "SchemaError", e.what(), kExitConfig);
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    print_error(err, "IoError", e.what(), kExitIo);
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace pastq::cli
