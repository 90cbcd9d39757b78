#pragma once

#include <optional>
#include <string>

#include "cycleflow/serialization.hpp"
#include "cycleflow/simulation.hpp"

namespace cycleflow {

Json network_to_json(const Network& net);
/// Either {"builder": "corridor" | "fourway", ...parameters} or an inline
/// {nodes, edges, connections, signals} description. Throws
/// Error{ConfigError}.
Network network_from_json(const Json& j);

/// Scenario file. Vehicle type names resolve, in order, to entries of
/// "vtypes", the class names of `models` (all, slow, medium, fast), "car"
/// and "sumo_default". "p_indirect" (a number, or an object keyed by
/// vtype name) overrides the bicycles' turn probabilities.
/// Throws Error{ConfigError}.
ScenarioConfig scenario_from_json(const Json& j, const ClassModels* models = nullptr);

struct CorridorOptions {
  double length = 1528.0;
  double speed_limit = 13.9;
  std::string vtype = "sumo_default";
  double bicycle_rate = 300.0;  // per hour
  std::size_t bicycle_count = 0;
  double car_rate = 0.0;  // per hour
};

struct FourWayOptions {
  FourWaySpec network;
  std::string vtype = "sumo_default";
  double bicycle_rate = 150.0;  // per hour and approach
  std::size_t bicycle_count = 0;  // per approach
  std::map<Movement, double> bicycle_turns = {{Movement::Straight, 0.4}, {Movement::Left, 0.4},
                                              {Movement::Right, 0.2}};
  double car_rate = 0.0;  // per hour and approach
  std::optional<double> p_indirect;
};

/// Builtin scenarios; `sim` supplies duration, seed and dynamics.
ScenarioConfig corridor_scenario(const CorridorOptions& options, const SimulationConfig& sim,
                                 const ClassModels* models = nullptr);
ScenarioConfig fourway_scenario(const FourWayOptions& options, const SimulationConfig& sim,
                                const ClassModels* models = nullptr);

/// Source for a vtype name: a model class, "car" or "sumo_default".
/// Throws Error{ConfigError}.
VehicleSource resolve_vtype(const std::string& name, const ClassModels* models);

}  // namespace cycleflow
