#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <cycleflow/serialization.hpp>

namespace cycleflow::cli {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

struct IngestOptions {
  fs::path input;
  fs::path output;
  double accuracy_threshold = 20.0;  // m
  std::size_t min_samples = 20;
  bool keep_ebikes = false;
  double gaussian_sigma = 2.0;
  std::size_t gaussian_window = 7;
  double lowpass_alpha = 0.5;
  double stop_threshold = 0.5;  // m/s
};

struct AnalyzeOptions {
  fs::path profiles;
  fs::path output;
  double stop_threshold = 0.5;  // m/s
  ManeuverRules rules;
};

struct ClassesOptions {
  fs::path rides;
  fs::path thresholds;
  fs::path fits;
  fs::path output;
  bool published = false;
  Json model_config = Json::object();
};

struct FitOptionsCli {
  fs::path kinematics;
  fs::path thresholds;
  std::vector<std::string> classes;
  fs::path output;
  std::size_t restarts = 3;
  std::size_t min_samples = 30;
  Json model_config = Json::object();
};

struct SimulateOptions {
  std::string builtin;  // corridor or fourway, empty with a scenario file
  fs::path scenario;
  fs::path models;
  fs::path output;
  std::string vtype = "sumo_default";
  double length = 1528.0;     // m
  double speed_limit = 13.9;  // m/s
  std::optional<double> rate;  // vehicles per hour (per approach for fourway)
  std::size_t count = 0;
  double car_rate = 0.0;  // vehicles per hour
  std::optional<double> p_indirect;
  std::string turns;  // e.g. straight=0.4,left=0.4,right=0.2
  double duration = 3600.0;  // s
  double dt = 1.0;           // s
  double sigma = 0.1;
  double gap_acceptance = 4.0;  // s
  bool no_trajectories = false;
};

struct EvalOptions {
  std::vector<std::string> runs;  // label=path
  fs::path empirical;
  fs::path output;
  double accel_threshold = 1.2;  // m/s^2
  double speed_threshold = 5.56;  // m/s
};

struct ExportOptions {
  fs::path models;
  std::string cls = "all";
  std::size_t n = 100;
  std::string id;
  fs::path output;
};

struct SynthOptions {
  std::string mode = "rides";  // rides or kinematics
  fs::path output;
  std::size_t n = 20;
  std::size_t malformed = 0;
  std::size_t ebikes = 0;
  std::size_t regions = 1;
  double noise = 1.0;      // m
  double accuracy = 5.0;   // m
  double interval = 3.0;   // s
  std::size_t maneuvers = 8;  // per ride, kinematics mode
  Json generators = Json::object();
};

int run_ingest(const IngestOptions& o, const Globals& g);
int run_analyze(const AnalyzeOptions& o, const Globals& g);
int run_classes(const ClassesOptions& o, const Globals& g);
int run_fit(const FitOptionsCli& o, const Globals& g);
int run_simulate(const SimulateOptions& o, const Globals& g);
int run_eval(const EvalOptions& o, const Globals& g);
int run_export_sumo(const ExportOptions& o, const Globals& g);
int run_synth(const SynthOptions& o, const Globals& g);

}  // namespace cycleflow::cli
