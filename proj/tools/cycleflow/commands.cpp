#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <cycleflow/cyclist_model.hpp>
#include <cycleflow/distributions.hpp>
#include <cycleflow/error.hpp>
#include <cycleflow/evaluation.hpp>
#include <cycleflow/maneuver.hpp>
#include <cycleflow/parallel.hpp>
#include <cycleflow/preprocess.hpp>
#include <cycleflow/ride.hpp>
#include <cycleflow/rng.hpp>
#include <cycleflow/scenario.hpp>
#include <cycleflow/simulation.hpp>

namespace cycleflow::cli {
namespace {

std::string snake_case(std::string_view name) {
  std::string out;
  for (const char c : name) {
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (!out.empty()) out += '_';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += c;
    }
  }
  return out;
}

void require_dir(const fs::path& dir, const std::string& what) {
  if (dir.empty()) throw Error(ErrorCode::ConfigError, what + " directory not given");
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, what + " directory not found: " + dir.string());
}

void require_file(const fs::path& file, const std::string& what) {
  if (file.empty()) throw Error(ErrorCode::ConfigError, what + " not given");
  if (!fs::is_regular_file(file)) throw Error(ErrorCode::IoError, what + " not found: " + file.string());
}

std::vector<fs::path> list_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename().string().starts_with(".")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Failures that reject one input ride instead of aborting the stage.
bool is_ride_rejection(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedFile:
    case ErrorCode::EmptyRide:
    case ErrorCode::NonMonotonicTime:
    case ErrorCode::TooShort:
    case ErrorCode::NoMovement:
      return true;
    default:
      return false;
  }
}

std::vector<RideKinematics> read_kinematics(const fs::path& dir) {
  require_dir(dir, "kinematics");
  return parse_kinematics_csv(read_file(dir / "rides.csv"), read_file(dir / "maneuvers.csv"));
}

ClassModels read_models(const fs::path& path) { return models_from_json(read_json_file(path)); }

DistParams generator_params(const Json& j, DistFamily& family) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "generator must be an object");
  try {
    family = family_from_string(j.at("family").get<std::string>());
    DistParams p;
    p.shape = j.at("shape").get<std::vector<double>>();
    p.loc = j.value("loc", 0.0);
    p.scale = j.value("scale", 1.0);
    validate(family, p);
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("generator: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

double draw_in(DistFamily family, const DistParams& p, Bounds bounds, Rng& rng) {
  for (int i = 0; i < 1000; ++i) {
    const double x = sample(family, p, rng);
    if (bounds.contains(x)) return x;
  }
  throw Error(ErrorCode::TruncationExhausted, "generator puts no mass inside its bounds");
}

}  // namespace

int run_ingest(const IngestOptions& o, const Globals& g) {
  require_dir(o.input, "input");
  if (o.output.empty()) throw Error(ErrorCode::ConfigError, "output directory not given");
  FilterConfig filter{o.gaussian_sigma, o.gaussian_window, o.lowpass_alpha, o.stop_threshold};
  filter.validate();
  const RideFilter ride_filter{o.accuracy_threshold, o.min_samples, !o.keep_ebikes};

  const auto files = list_files(o.input);
  struct Parsed {
    std::optional<Ride> ride;
    std::string rejection;
  };
  std::vector<Parsed> parsed(files.size());
  parallel_for(files.size(), g.jobs, [&](std::size_t i) {
    const auto rel = fs::relative(files[i], o.input);
    std::string id = rel.generic_string();
    std::replace(id.begin(), id.end(), ',', '_');
    const std::string region =
        rel.has_parent_path() ? rel.begin()->string() : fs::absolute(o.input).filename().string();
    try {
      parsed[i].ride = parse_ride_file(read_file(files[i]), {}, id, region).ride;
    } catch (const Error& e) {
      if (!is_ride_rejection(e.code())) throw;
      parsed[i].rejection = snake_case(to_string(e.code()));
    }
  });

  IngestStats stats;
  std::vector<Ride> rides;
  for (auto& p : parsed) {
    if (p.ride) rides.push_back(std::move(*p.ride));
    else stats.reject(p.rejection);
  }
  auto filtered = filter_rides(std::move(rides), ride_filter);
  for (const auto& [reason, count] : filtered.stats.rejection_reasons) stats.reject(reason, count);

  std::vector<std::optional<VelocityProfile>> profiles(filtered.kept.size());
  std::vector<std::string> failures(filtered.kept.size());
  parallel_for(filtered.kept.size(), g.jobs, [&](std::size_t i) {
    try {
      profiles[i] = preprocess_ride(filtered.kept[i], filter);
    } catch (const Error& e) {
      if (!is_ride_rejection(e.code())) throw;
      failures[i] = snake_case(to_string(e.code()));
    }
  });
  std::vector<std::pair<std::string, VelocityProfile>> out;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i]) out.emplace_back(filtered.kept[i].id, std::move(*profiles[i]));
    else stats.reject(failures[i]);
  }
  stats.files_total = files.size();
  stats.files_used = out.size();

  write_file(o.output / "ingest_stats.json", to_json(stats) + "\n");
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no ride survived ingestion of " + o.input.string());
  write_file(o.output / "profiles.csv", profiles_csv(out));
  std::cout << "ingest: " << stats.files_used << " of " << stats.files_total << " files used\n";
  return 0;
}

int run_analyze(const AnalyzeOptions& o, const Globals& g) {
  require_file(o.profiles, "profiles file");
  if (o.output.empty()) throw Error(ErrorCode::ConfigError, "output directory not given");
  const auto profiles = parse_profiles_csv(read_file(o.profiles));
  if (profiles.empty()) throw Error(ErrorCode::EmptyInput, "no profiles in " + o.profiles.string());
  std::vector<RideKinematics> rides(profiles.size());
  parallel_for(profiles.size(), g.jobs, [&](std::size_t i) {
    rides[i] = extract_kinematics(profiles[i].second, o.stop_threshold, o.rules);
    rides[i].ride_id = profiles[i].first;
  });
  write_file(o.output / "rides.csv", rides_csv(rides));
  write_file(o.output / "maneuvers.csv", maneuvers_csv(rides));
  std::size_t count = 0;
  for (const auto& r : rides) count += r.maneuvers.size();
  std::cout << "analyze: " << rides.size() << " rides, " << count << " maneuvers\n";
  return 0;
}

int run_classes(const ClassesOptions& o, const Globals& g) {
  if (o.output.empty()) throw Error(ErrorCode::ConfigError, "output file not given");

  if (!o.fits.empty()) {
    require_file(o.fits, "fits file");
    require_file(o.thresholds, "thresholds file");
    auto config = model_config_from_json(o.model_config);
    config.jobs = g.jobs;
    ClassModels models;
    models.thresholds = thresholds_from_json(read_json_file(o.thresholds));
    models.fits = fits_from_json(read_json_file(o.fits));
    for (const auto& [cls, fits] : models.fits) models.specs[cls] = make_spec(cls, fits, config);
    write_file(o.output, models_to_json(models).dump(2) + "\n");
    std::cout << "classes: " << models.specs.size() << " class models written\n";
    return 0;
  }

  require_file(o.rides, "rides file");
  const auto rides = parse_kinematics_csv(read_file(o.rides), "ride_id,kind\n");
  std::vector<double> avg;
  for (const auto& r : rides) avg.push_back(r.avg_moving_velocity);
  const auto t = o.published ? ClassThresholds::published() : derive_thresholds(avg);
  std::map<std::string, std::size_t> counts{{"slow", 0}, {"medium", 0}, {"fast", 0}};
  for (const double v : avg) ++counts[to_string(classify_ride(v, t))];
  auto j = thresholds_to_json(t);
  j["method"] = o.published ? "published" : "quartiles";
  j["slow_max_kmh"] = t.slow_max * 3.6;
  j["fast_min_kmh"] = t.fast_min * 3.6;
  j["counts"] = counts;
  write_file(o.output, j.dump(2) + "\n");
  std::cout << "classes: slow <= " << t.slow_max << " m/s < medium <= " << t.fast_min << " m/s < fast\n";
  return 0;
}

int run_fit(const FitOptionsCli& o, const Globals& g) {
  if (o.output.empty()) throw Error(ErrorCode::ConfigError, "output file not given");
  const auto rides = read_kinematics(o.kinematics);
  ClassThresholds thresholds;
  if (!o.thresholds.empty()) {
    thresholds = thresholds_from_json(read_json_file(o.thresholds));
  } else {
    std::vector<double> avg;
    for (const auto& r : rides) avg.push_back(r.avg_moving_velocity);
    thresholds = derive_thresholds(avg);
  }
  auto config = model_config_from_json(o.model_config);
  config.fit.restarts = o.restarts;
  config.fit.min_samples = o.min_samples;
  config.fit.jitter_seed = g.seed;

  std::vector<CyclistClass> classes;
  for (const auto& name : o.classes) {
    const auto cls = cyclist_class_from_string(name);
    if (std::find(classes.begin(), classes.end(), cls) == classes.end()) classes.push_back(cls);
  }
  if (classes.empty()) classes.assign(kAllClasses.begin(), kAllClasses.end());

  const auto pooled = pool_by_class(rides, thresholds);
  for (const auto cls : classes) {
    const auto it = pooled.find(cls);
    if (it == pooled.end() || it->second.rides == 0)
      throw Error(ErrorCode::EmptyClass, "class " + to_string(cls) + " has no rides");
  }

  constexpr std::array<Quantity, 3> quantities = {Quantity::Accel, Quantity::Decel, Quantity::VMax};
  std::vector<std::vector<FittedDist>> results(classes.size() * quantities.size());
  parallel_for(results.size(), g.jobs, [&](std::size_t i) {
    const auto cls = classes[i / quantities.size()];
    const auto q = quantities[i % quantities.size()];
    results[i] = select_best_fit(pooled.at(cls).values(q), config.families(q), config.fit);
  });
  std::map<CyclistClass, QuantityFits> fits;
  for (std::size_t i = 0; i < results.size(); ++i)
    fits[classes[i / quantities.size()]].get(quantities[i % quantities.size()]) = std::move(results[i]);

  write_file(o.output, fits_to_json(fits).dump(2) + "\n");
  for (const auto& [cls, f] : fits) {
    std::cout << to_string(cls) << ":";
    for (const auto q : quantities) {
      const auto& ranked = f.get(q);
      std::cout << " " << to_string(q) << "=" << (ranked.empty() || !ranked.front().converged
                                                     ? std::string("none")
                                                     : to_string(ranked.front().family));
    }
    std::cout << "\n";
  }
  return 0;
}

namespace {

std::map<Movement, double> parse_turns(const std::string& text) {
  std::map<Movement, double> turns;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "turn weight must look like left=0.4");
    try {
      turns[movement_from_string(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ConfigError, "bad turn weight '" + item + "'");
    }
  }
  return turns;
}

}  // namespace

int run_simulate(const SimulateOptions& o, const Globals& g) {
  if (o.output.empty()) throw Error(ErrorCode::ConfigError, "output directory not given");
  std::optional<ClassModels> models;
  if (!o.models.empty()) models = read_models(o.models);
  const ClassModels* mp = models ? &*models : nullptr;

  SimulationConfig sim;
  sim.duration = o.duration;
  sim.dt = o.dt;
  sim.sigma = o.sigma;
  sim.gap_acceptance = o.gap_acceptance;
  sim.seed = g.seed;
  sim.record_trajectories = !o.no_trajectories;

  ScenarioConfig scenario;
  if (!o.scenario.empty()) {
    if (!o.builtin.empty()) throw Error(ErrorCode::ConfigError, "give either a builtin scenario or --scenario");
    const auto j = read_json_file(o.scenario);
    scenario = scenario_from_json(j, mp);
    // Values the file leaves out come from the flags.
    if (!j.contains("seed")) scenario.sim.seed = sim.seed;
    if (!j.contains("duration")) scenario.sim.duration = sim.duration;
    if (!j.contains("dt")) scenario.sim.dt = sim.dt;
    if (!j.contains("sigma")) scenario.sim.sigma = sim.sigma;
    if (!j.contains("gap_acceptance")) scenario.sim.gap_acceptance = sim.gap_acceptance;
    if (!j.contains("record_trajectories")) scenario.sim.record_trajectories = sim.record_trajectories;
    scenario.validate();
  } else if (o.builtin == "corridor") {
    CorridorOptions c;
    c.length = o.length;
    c.speed_limit = o.speed_limit;
    c.vtype = o.vtype;
    c.bicycle_rate = o.rate.value_or(c.bicycle_rate);
    c.bicycle_count = o.count;
    c.car_rate = o.car_rate;
    scenario = corridor_scenario(c, sim, mp);
  } else if (o.builtin == "fourway") {
    FourWayOptions f;
    f.network.speed_limit = o.speed_limit;
    f.vtype = o.vtype;
    f.bicycle_rate = o.rate.value_or(f.bicycle_rate);
    f.bicycle_count = o.count;
    f.car_rate = o.car_rate;
    f.p_indirect = o.p_indirect;
    if (!o.turns.empty()) f.bicycle_turns = parse_turns(o.turns);
    scenario = fourway_scenario(f, sim, mp);
  } else if (o.builtin.empty()) {
    throw Error(ErrorCode::ConfigError, "no scenario: give corridor, fourway or --scenario FILE");
  } else {
    throw Error(ErrorCode::ConfigError, "unknown builtin scenario '" + o.builtin + "'");
  }

  const auto result = run_scenario(scenario);
  write_file(o.output / "network.json", network_to_json(scenario.network).dump(2) + "\n");
  write_file(o.output / "summary.csv", summary_csv(result.summaries));
  if (scenario.sim.record_trajectories) write_file(o.output / "trajectories.csv", trajectory_csv(result.records));
  std::cout << "simulate: " << result.summaries.size() << " vehicles, " << result.records.size()
            << " records, ended at t=" << result.end_time << " s\n";
  return 0;
}

namespace {

struct RunInput {
  std::string label;
  fs::path dir;
  fs::path trajectories;
};

RunInput parse_run(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigError, "run must be label=path: " + spec);
  RunInput r;
  r.label = spec.substr(0, eq);
  const fs::path path = spec.substr(eq + 1);
  if (fs::is_directory(path)) {
    r.dir = path;
    r.trajectories = path / "trajectories.csv";
  } else {
    r.dir = path.parent_path();
    r.trajectories = path;
  }
  require_file(r.trajectories, "trajectories for " + r.label);
  return r;
}

std::set<std::string> bicycle_ids(const fs::path& summary) {
  std::set<std::string> ids;
  const auto content = read_file(summary);
  std::stringstream ss(content);
  std::string line;
  std::getline(ss, line);
  if (line.rfind("vehicle_id,class,kind", 0) != 0)
    throw Error(ErrorCode::MalformedFile, "unexpected summary header in " + summary.string());
  while (std::getline(ss, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() >= 3 && f[2] == "bicycle") ids.insert(f[0]);
  }
  return ids;
}

CrossingRegion region_for(const RunInput& run, const std::vector<TrajectoryRecord>& records) {
  const auto net_file = run.dir / "network.json";
  if (fs::is_regular_file(net_file)) return left_turn_region(network_from_json(read_json_file(net_file)));
  // Fall back on the naming of the builtin four-way box.
  CrossingRegion region;
  for (const auto& r : records) {
    const auto& e = r.edge;
    const bool leg = e.ends_with("_leg1") || e.ends_with("_leg2");
    if (leg || e.ends_with("_left")) region.edges.insert(e);
    if (leg) region.indirect_edges.insert(e);
  }
  return region;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return s;
}

}  // namespace

int run_eval(const EvalOptions& o, const Globals& g) {
  if (o.runs.empty()) throw Error(ErrorCode::ConfigError, "no runs given (label=path)");
  if (o.output.empty()) throw Error(ErrorCode::ConfigError, "output directory not given");
  std::vector<RunInput> runs;
  for (const auto& spec : o.runs) runs.push_back(parse_run(spec));

  const std::array<std::string, 3> quantities = {"max_v", "max_a", "max_d"};
  std::map<std::string, std::vector<StatsRow>> rows;
  std::map<std::string, std::map<std::string, std::vector<double>>> values;  // quantity -> source -> values
  Json report = Json::object();
  report["seed"] = g.seed;

  bool have_empirical = false;
  if (!o.empirical.empty() && fs::is_regular_file(o.empirical / "rides.csv") &&
      fs::is_regular_file(o.empirical / "maneuvers.csv")) {
    const auto rides = read_kinematics(o.empirical);
    auto& v = values["max_v"]["empirical"];
    auto& a = values["max_a"]["empirical"];
    auto& d = values["max_d"]["empirical"];
    for (const auto& r : rides) {
      v.push_back(r.v_max);
      for (const auto& m : r.maneuvers) (m.kind == ManeuverKind::Acceleration ? a : d).push_back(m.peak_rate);
    }
    have_empirical = !v.empty();
  }
  if (!have_empirical) {
    std::cerr << "warning: no empirical kinematics"
              << (o.empirical.empty() ? "" : " at " + o.empirical.string())
              << "; reporting simulation runs only\n";
  }

  std::vector<std::string> sources;
  if (have_empirical) sources.push_back("empirical");
  Json crossing = Json::object();
  std::vector<StatsRow> crossing_rows;
  for (const auto& run : runs) {
    sources.push_back(run.label);
    const auto records = parse_trajectory_csv(read_file(run.trajectories));
    const auto summary = run.dir / "summary.csv";
    std::optional<std::set<std::string>> bikes;
    if (fs::is_regular_file(summary)) bikes = bicycle_ids(summary);
    for (const auto& m : maxima_from_trajectories(records)) {
      if (bikes && !bikes->count(m.vehicle_id)) continue;
      values["max_v"][run.label].push_back(m.max_v);
      values["max_a"][run.label].push_back(m.max_a);
      values["max_d"][run.label].push_back(m.max_d);
    }

    const auto region = region_for(run, records);
    if (region.edges.empty()) continue;
    const auto result = measure_crossing_durations(records, region);
    std::vector<double> direct, indirect, all;
    std::string csv = "vehicle_id,kind,enter_t,exit_t,duration\n";
    for (const auto& m : result.measurements) {
      (m.kind == TurnKind::Direct ? direct : indirect).push_back(m.duration);
      all.push_back(m.duration);
      std::ostringstream line;
      line << m.vehicle_id << "," << to_string(m.kind) << "," << m.enter_t << "," << m.exit_t << "," << m.duration
           << "\n";
      csv += line.str();
    }
    write_file(o.output / ("crossings_" + sanitize(run.label) + ".csv"), csv);
    if (!all.empty()) write_file(o.output / ("ecdf_" + sanitize(run.label) + ".csv"), ecdf_csv(ecdf(all)));
    Json cj{{"direct", direct.size()}, {"indirect", indirect.size()}, {"still_inside", result.still_inside}};
    if (!direct.empty()) crossing_rows.push_back({run.label + "/direct", summary_stats(direct)});
    if (!indirect.empty()) crossing_rows.push_back({run.label + "/indirect", summary_stats(indirect)});
    if (!direct.empty() && !indirect.empty()) {
      Rng rng = Rng::substream(g.seed, 1);
      const auto b = bootstrap_mean_difference(indirect, direct, 0.95, 2000, rng);
      cj["mean_difference"] = b.observed;
      cj["lower_bound_95"] = b.lower_bound;
    }
    crossing[run.label] = cj;
  }

  for (const auto& q : quantities) {
    Json qj = Json::object();
    for (const auto& src : sources) {
      const auto& xs = values[q][src];
      if (xs.empty()) continue;
      rows[q].push_back({src, summary_stats(xs)});
      write_file(o.output / ("ecdf_" + q + "_" + sanitize(src) + ".csv"), ecdf_csv(ecdf(xs)));
      Json sj{{"n", xs.size()}};
      if (q == "max_a") sj["fraction_at_least_threshold"] = fraction_exceeding(xs, o.accel_threshold);
      if (q == "max_v") sj["fraction_at_least_threshold"] = fraction_exceeding(xs, o.speed_threshold);
      if (have_empirical && src != "empirical" && !values[q]["empirical"].empty())
        sj["ks_vs_empirical"] = ks_two_sample(xs, values[q]["empirical"]);
      qj[src] = sj;
    }
    report[q] = qj;
    write_file(o.output / ("stats_" + q + ".csv"), stats_csv(rows[q]));
    std::cout << stats_table(q, rows[q]) << "\n";
  }
  if (!crossing_rows.empty()) {
    write_file(o.output / "stats_crossing.csv", stats_csv(crossing_rows));
    std::cout << stats_table("left-turn crossing duration [s]", crossing_rows) << "\n";
  }
  report["crossing"] = crossing;
  report["empirical"] = have_empirical;
  write_file(o.output / "report.json", report.dump(2) + "\n");
  return 0;
}

int run_export_sumo(const ExportOptions& o, const Globals& g) {
  const auto cls = cyclist_class_from_string(o.cls);
  VTypeDistributionSpec spec = sumo_default_spec();
  if (!o.models.empty()) {
    const auto models = read_models(o.models);
    const auto it = models.specs.find(cls);
    if (it == models.specs.end()) throw Error(ErrorCode::EmptyClass, "models have no class " + o.cls);
    spec = it->second;
  }
  const auto xml = export_sumo_vtypes(spec, o.n, g.seed, o.id);
  if (o.output.empty()) std::cout << xml;
  else write_file(o.output, xml);
  return 0;
}

namespace {

// A ride of cruising, a few slow-downs, and a final stop.
SynthSpec random_ride_spec(std::size_t i, const SynthOptions& o, Rng& rng) {
  SynthSpec s;
  s.id = "ride_" + std::to_string(i);
  s.start_lat = 52.50 + 0.05 * rng.uniform();
  s.start_lon = 13.30 + 0.08 * rng.uniform();
  s.heading_deg = 360.0 * rng.uniform();
  s.start_time_ms += static_cast<std::int64_t>(i) * 3'600'000;
  s.sample_interval_s = o.interval;
  s.noise_sigma_m = o.noise;
  s.accuracy_m = o.accuracy;
  const double cruise = std::clamp(4.4 + 0.9 * rng.normal(), 2.0, 8.0);
  auto ramp = [&](double from, double to) {
    const double rate = 0.3 + 1.1 * rng.uniform();
    s.plan.push_back({std::abs(to - from) / rate, to > from ? rate : -rate});
  };
  ramp(0.0, cruise);
  s.plan.push_back({20.0 + 60.0 * rng.uniform(), 0.0});
  const auto dips = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
  for (std::size_t k = 0; k < dips; ++k) {
    const double low = cruise * (0.3 + 0.4 * rng.uniform());
    ramp(cruise, low);
    s.plan.push_back({5.0 + 10.0 * rng.uniform(), 0.0});
    ramp(low, cruise);
    s.plan.push_back({20.0 + 60.0 * rng.uniform(), 0.0});
  }
  ramp(cruise, 0.0);
  return s;
}

void synth_rides(const SynthOptions& o, const Globals& g) {
  const std::size_t regions = std::max<std::size_t>(o.regions, 1);
  auto file_for = [&](std::size_t i, const std::string& stem) {
    return o.output / ("region_" + std::to_string(i % regions)) / stem;
  };
  std::size_t index = 0;
  for (std::size_t i = 0; i < o.n + o.ebikes; ++i, ++index) {
    Rng rng = Rng::substream(g.seed, i);
    const auto spec = random_ride_spec(i, o, rng);
    auto ride = synthesize_ride(spec, Rng::substream(g.seed, 100000 + i).next_u64());
    if (i >= o.n) ride.bike_type = BikeType::EBike;
    write_file(file_for(index, spec.id), write_ride_file(ride, 2));
  }
  for (std::size_t i = 0; i < o.malformed; ++i, ++index)
    write_file(file_for(index, "broken_" + std::to_string(i)), "lat,lon,timeStamp\nnot a ride file\n");
}

void synth_kinematics(const SynthOptions& o, const Globals& g) {
  const Json defaults = {
      {"accel", {{"family", "burr12"}, {"shape", {4.0, 2.0}}, {"loc", 0.0}, {"scale", 0.9}}},
      {"decel", {{"family", "johnsonsu"}, {"shape", {-1.5, 2.0}}, {"loc", 0.6}, {"scale", 0.5}}},
      {"vmax", {{"family", "gennorm"}, {"shape", {1.5}}, {"loc", 6.5}, {"scale", 1.2}}},
  };
  Json gen = defaults;
  for (const auto& [k, v] : o.generators.items()) gen[k] = v;
  DistFamily fa, fd, fv;
  const auto pa = generator_params(gen["accel"], fa);
  const auto pd = generator_params(gen["decel"], fd);
  const auto pv = generator_params(gen["vmax"], fv);

  std::vector<RideKinematics> rides;
  for (std::size_t i = 0; i < o.n; ++i) {
    Rng rng = Rng::substream(g.seed, i);
    RideKinematics k;
    k.ride_id = "ride_" + std::to_string(i);
    k.v_max = draw_in(fv, pv, {0.0, 15.0}, rng);
    k.avg_moving_velocity = k.v_max * (0.55 + 0.35 * rng.uniform());
    for (std::size_t m = 0; m < o.maneuvers; ++m) {
      Maneuver man;
      man.kind = m % 2 == 0 ? ManeuverKind::Acceleration : ManeuverKind::Deceleration;
      man.peak_rate = man.kind == ManeuverKind::Acceleration ? draw_in(fa, pa, {0.0, 7.0}, rng)
                                                             : draw_in(fd, pd, {0.0, 7.0}, rng);
      man.start_idx = 3 * m;
      man.end_idx = 3 * m + 3;
      man.duration = 9.0;
      man.v_start = man.kind == ManeuverKind::Acceleration ? 0.5 * k.v_max : k.v_max;
      man.v_end = man.kind == ManeuverKind::Acceleration ? k.v_max : 0.5 * k.v_max;
      man.distance = 0.5 * (man.v_start + man.v_end) * man.duration;
      k.maneuvers.push_back(man);
    }
    rides.push_back(std::move(k));
  }
  write_file(o.output / "rides.csv", rides_csv(rides));
  write_file(o.output / "maneuvers.csv", maneuvers_csv(rides));
  write_file(o.output / "generators.json", gen.dump(2) + "\n");
}

}  // namespace

int run_synth(const SynthOptions& o, const Globals& g) {
  if (o.output.empty()) throw Error(ErrorCode::ConfigError, "output directory not given");
  if (o.mode == "rides") synth_rides(o, g);
  else if (o.mode == "kinematics") synth_kinematics(o, g);
  else throw Error(ErrorCode::ConfigError, "synth mode must be rides or kinematics");
  std::cout << "synth: wrote " << o.mode << " to " << o.output.string() << "\n";
  return 0;
}

}  // namespace cycleflow::cli
