// cycleflow: cyclist kinematics pipeline and microsimulator.
//
//   cycleflow synth --output rides/ --n 50
//   cycleflow ingest --input rides/ --output work/
//   cycleflow analyze --profiles work/profiles.csv --output work/
//   cycleflow classes --rides work/rides.csv --output work/thresholds.json
//   cycleflow fit --kinematics work/ --thresholds work/thresholds.json --output work/fits.json
//   cycleflow classes --fits work/fits.json --thresholds work/thresholds.json --output work/models.json
//   cycleflow simulate corridor --length 1528 --models work/models.json --vtype all --output run/
//   cycleflow eval dist=run/ --empirical work/ --output report/
//   cycleflow export-sumo --models work/models.json --class medium --n 100

#include <CLI11.hpp>
#include <iostream>

#include <cycleflow/error.hpp>
#include <cycleflow/serialization.hpp>

#include "commands.hpp"

namespace {

using cycleflow::Json;

std::string as_argument(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Keys of a --config file that name an option of the subcommand (or a
// global one) replace the value given on the command line. The remaining
// keys are handed to the stage as structured configuration.
Json apply_config(CLI::App& app, CLI::App& sub, const std::string& path) {
  if (path.empty()) return Json::object();
  const Json j = cycleflow::read_json_file(path);
  if (!j.is_object()) throw cycleflow::Error(cycleflow::ErrorCode::ConfigError, "config file must hold an object");
  Json rest = Json::object();
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = sub.get_option_no_throw(flag);
    if (!opt) opt = app.get_option_no_throw(flag);
    if (!opt || value.is_object()) {
      rest[key] = value;
      continue;
    }
    opt->clear();
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(as_argument(v));
    } else {
      opt->add_result(as_argument(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw cycleflow::Error(cycleflow::ErrorCode::ConfigError, "config key '" + key + "': " + e.what());
    }
  }
  return rest;
}

void report_error(bool json, const std::string& code, const std::string& message) {
  if (json) {
    std::cerr << Json{{"error", code}, {"message", message}}.dump() << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = cycleflow::cli;
  CLI::App app{"Cyclist kinematics from GPS rides, fitted vehicle types, and a small traffic simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::Globals globals;
  bool json_errors = false;
  std::string config;
  app.add_option("--seed", globals.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--jobs", globals.jobs, "Worker threads; outputs do not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_flag("--json-errors", json_errors, "Report failures as one JSON object on stderr");
  app.add_option("--config", config, "JSON file whose keys override the flags");

  cli::IngestOptions ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Parse, filter and smooth ride files into velocity profiles");
  s_ingest->add_option("--input", ingest.input, "Directory of ride files (searched recursively)")->required();
  s_ingest->add_option("--output", ingest.output, "Directory for profiles.csv and ingest_stats.json")->required();
  s_ingest->add_option("--accuracy-threshold", ingest.accuracy_threshold, "Max mean GPS accuracy [m]")
      ->capture_default_str();
  s_ingest->add_option("--min-samples", ingest.min_samples, "Min GPS fixes per ride")->capture_default_str();
  s_ingest->add_flag("--keep-ebikes", ingest.keep_ebikes, "Keep rides tagged as e-bikes");
  s_ingest->add_option("--gaussian-sigma", ingest.gaussian_sigma, "Position smoothing sigma [samples]")
      ->capture_default_str();
  s_ingest->add_option("--gaussian-window", ingest.gaussian_window, "Position smoothing window [samples, odd]")
      ->capture_default_str();
  s_ingest->add_option("--lowpass-alpha", ingest.lowpass_alpha, "Velocity low-pass weight")->capture_default_str();
  s_ingest->add_option("--stop-threshold", ingest.stop_threshold, "Speeds below this are stops [m/s]")
      ->capture_default_str();

  cli::AnalyzeOptions analyze;
  auto* s_analyze = app.add_subcommand("analyze", "Extract maneuvers and per-ride kinematics");
  s_analyze->add_option("--profiles", analyze.profiles, "profiles.csv from ingest")->required();
  s_analyze->add_option("--output", analyze.output, "Directory for rides.csv and maneuvers.csv")->required();
  s_analyze->add_option("--stop-threshold", analyze.stop_threshold, "Moving-speed floor [m/s]")
      ->capture_default_str();
  s_analyze->add_option("--min-distance", analyze.rules.min_distance, "[m]")->capture_default_str();
  s_analyze->add_option("--max-distance", analyze.rules.max_distance, "[m]")->capture_default_str();
  s_analyze->add_option("--min-duration", analyze.rules.min_duration, "[s]")->capture_default_str();
  s_analyze->add_option("--max-duration", analyze.rules.max_duration, "[s]")->capture_default_str();
  s_analyze->add_option("--min-velocity-change", analyze.rules.min_velocity_change,
                        "Relative speed change a maneuver must exceed")
      ->capture_default_str();
  s_analyze->add_option("--emergency-decel", analyze.rules.emergency_decel, "Harder decelerations are dropped [m/s^2]")
      ->capture_default_str();

  cli::ClassesOptions classes;
  auto* s_classes = app.add_subcommand(
      "classes", "Derive slow/medium/fast thresholds, or bind fits to classes with --fits");
  s_classes->add_option("--rides", classes.rides, "rides.csv from analyze");
  s_classes->add_flag("--published", classes.published, "Use 13.5 / 17.9 km/h instead of the quartiles");
  s_classes->add_option("--fits", classes.fits, "fits.json from fit; writes class models");
  s_classes->add_option("--thresholds", classes.thresholds, "thresholds.json (with --fits)");
  s_classes->add_option("--output", classes.output, "thresholds.json or models.json")->required();

  cli::FitOptionsCli fit;
  auto* s_fit = app.add_subcommand("fit", "Fit candidate distributions per class and quantity");
  s_fit->add_option("--kinematics", fit.kinematics, "Directory holding rides.csv and maneuvers.csv")->required();
  s_fit->add_option("--thresholds", fit.thresholds, "thresholds.json; derived from the rides if omitted");
  s_fit->add_option("--class", fit.classes, "all, slow, medium or fast; repeatable (default: every class)");
  s_fit->add_option("--output", fit.output, "fits.json")->required();
  s_fit->add_option("--restarts", fit.restarts, "Optimizer restarts per family")->capture_default_str();
  s_fit->add_option("--min-samples", fit.min_samples, "Fewer samples fail the fit")->capture_default_str();

  cli::SimulateOptions sim;
  std::optional<double> rate, p_indirect;
  auto* s_sim = app.add_subcommand("simulate", "Run a builtin scenario or a scenario file");
  s_sim->add_option("builtin", sim.builtin, "corridor or fourway");
  s_sim->add_option("--scenario", sim.scenario, "Scenario JSON instead of a builtin");
  s_sim->add_option("--models", sim.models, "models.json from classes");
  s_sim->add_option("--output", sim.output, "Directory for trajectories.csv, summary.csv, network.json")
      ->required();
  s_sim->add_option("--vtype", sim.vtype, "Bicycle type: sumo_default or a model class")->capture_default_str();
  s_sim->add_option("--length", sim.length, "Corridor length [m]")->capture_default_str();
  s_sim->add_option("--speed-limit", sim.speed_limit, "Edge speed limit [m/s]")->capture_default_str();
  s_sim->add_option("--rate", rate, "Bicycle demand [veh/h] (per approach for fourway)");
  s_sim->add_option("--count", sim.count, "Bicycles per flow, 0 = unlimited")->capture_default_str();
  s_sim->add_option("--car-rate", sim.car_rate, "Car demand [veh/h] (per approach for fourway)")
      ->capture_default_str();
  s_sim->add_option("--p-indirect", p_indirect, "Override the bicycles' indirect-turn probability")
      ->check(CLI::Range(0.0, 1.0));
  s_sim->add_option("--turns", sim.turns, "Bicycle movement weights, e.g. straight=0.4,left=0.4,right=0.2");
  s_sim->add_option("--duration", sim.duration, "[s]")->capture_default_str();
  s_sim->add_option("--dt", sim.dt, "Step [s]")->capture_default_str();
  s_sim->add_option("--sigma", sim.sigma, "Dawdling imperfection in [0, 1]")->capture_default_str();
  s_sim->add_option("--gap-acceptance", sim.gap_acceptance, "Critical gap for direct left turns [s]")
      ->capture_default_str();
  s_sim->add_flag("--no-trajectories", sim.no_trajectories, "Only write the per-vehicle summary");

  cli::EvalOptions eval;
  auto* s_eval = app.add_subcommand("eval", "Compare simulated and empirical kinematics");
  s_eval->add_option("runs", eval.runs, "label=path of a simulate output directory or trajectories.csv")
      ->required();
  s_eval->add_option("--empirical", eval.empirical, "Directory holding rides.csv and maneuvers.csv");
  s_eval->add_option("--output", eval.output, "Report directory")->required();
  s_eval->add_option("--accel-threshold", eval.accel_threshold, "Reported share of max accel >= this [m/s^2]")
      ->capture_default_str();
  s_eval->add_option("--speed-threshold", eval.speed_threshold, "Reported share of max speed >= this [m/s]")
      ->capture_default_str();

  cli::ExportOptions exp;
  auto* s_export = app.add_subcommand("export-sumo", "Write a SUMO vTypeDistribution");
  s_export->add_option("--models", exp.models, "models.json; the stock bicycle if omitted");
  s_export->add_option("--class", exp.cls, "all, slow, medium or fast")->capture_default_str();
  s_export->add_option("--n", exp.n, "Number of vType entries")->capture_default_str();
  s_export->add_option("--id", exp.id, "Distribution id (default bicycle_<class>)");
  s_export->add_option("--output", exp.output, "XML file; stdout if omitted");

  cli::SynthOptions synth;
  auto* s_synth = app.add_subcommand("synth", "Generate fixture ride files or kinematics tables");
  s_synth->add_option("mode", synth.mode, "rides or kinematics")->capture_default_str();
  s_synth->add_option("--output", synth.output, "Output directory")->required();
  s_synth->add_option("--n", synth.n, "Number of rides")->capture_default_str();
  s_synth->add_option("--malformed", synth.malformed, "Extra unparsable files")->capture_default_str();
  s_synth->add_option("--ebikes", synth.ebikes, "Extra rides tagged as e-bikes")->capture_default_str();
  s_synth->add_option("--regions", synth.regions, "Spread files over this many region directories")
      ->capture_default_str();
  s_synth->add_option("--noise", synth.noise, "GPS noise sigma [m]")->capture_default_str();
  s_synth->add_option("--accuracy", synth.accuracy, "Reported GPS accuracy [m]")->capture_default_str();
  s_synth->add_option("--interval", synth.interval, "GPS fix interval [s]")->capture_default_str();
  s_synth->add_option("--maneuvers", synth.maneuvers, "Maneuvers per ride (kinematics mode)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0 || !json_errors) return app.exit(e);
    report_error(true, "UsageError", e.what());
    return e.get_exit_code();
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const Json rest = apply_config(app, *sub, config);
    sim.rate = rate;
    sim.p_indirect = p_indirect;
    if (sub == s_ingest) return cli::run_ingest(ingest, globals);
    if (sub == s_analyze) return cli::run_analyze(analyze, globals);
    if (sub == s_classes) {
      classes.model_config = rest;
      return cli::run_classes(classes, globals);
    }
    if (sub == s_fit) {
      fit.model_config = rest;
      return cli::run_fit(fit, globals);
    }
    if (sub == s_sim) return cli::run_simulate(sim, globals);
    if (sub == s_eval) return cli::run_eval(eval, globals);
    if (sub == s_export) return cli::run_export_sumo(exp, globals);
    if (sub == s_synth) {
      synth.generators = rest;
      return cli::run_synth(synth, globals);
    }
  } catch (const cycleflow::Error& e) {
    report_error(json_errors, std::string(cycleflow::to_string(e.code())), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(json_errors, "InternalError", e.what());
    return 3;
  }
  return 1;
}
