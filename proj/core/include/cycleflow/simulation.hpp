#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cycleflow/cyclist_model.hpp"
#include "cycleflow/network.hpp"
#include "cycleflow/rng.hpp"

namespace cycleflow {

struct TrajectoryRecord {
  double t = 0.0;  // s
  std::string vehicle_id;
  std::string edge;
  double pos = 0.0;  // m from edge start to the vehicle front
  double v = 0.0;    // m/s
  double a = 0.0;    // m/s^2, backward difference over one step
};

/// Krauss safe speed: v_l + (gap - v_l tau) / ((v + v_l) / (2 d) + tau).
/// Infinite for an infinite gap.
double krauss_safe_speed(double v, double gap, double v_leader, double d_max, double tau);

/// One Krauss update: min(v + a dt, v_safe, v_max) minus a dawdle drawn
/// uniformly from [0, sigma a dt], floored at 0. The dawdle is only drawn
/// when sigma > 0.
double krauss_step(double v, double gap, double v_leader, const VTypeParams& vtype, double dt, double sigma,
                   Rng& rng, double tau = 1.0);
/// Same update with a precomputed safe speed.
double krauss_update(double v, double v_safe, const VTypeParams& vtype, double dt, double sigma, Rng& rng);

enum class TurnKind { Direct, Indirect };
std::string to_string(TurnKind k);

struct TurnPlan {
  TurnKind kind = TurnKind::Direct;
  std::string node;                // intersection
  std::vector<std::string> edges;  // internal edges actually taken
  std::string wait_node;           // second stop line, Indirect only
};

/// Bernoulli(p_indirect) choice; only the kind is filled in.
TurnPlan plan_left_turn(const VTypeParams& vtype, Rng& rng);

enum class Movement { Straight, Left, Right };
std::string to_string(Movement m);
/// Throws Error{ConfigError}.
Movement movement_from_string(const std::string& s);

/// Bicycles sample their parameters per vehicle; cars use fixed values.
struct VehicleSource {
  bool bicycle = true;
  VTypeDistributionSpec spec;  // bicycle
  VTypeParams fixed;           // car
};

/// Background car: 2.6 m/s^2, 4.5 m/s^2, 13.9 m/s, 5 m long.
VTypeParams default_car_params();
VehicleSource car_source(const VTypeParams& params = default_car_params());
VehicleSource bicycle_source(const VTypeDistributionSpec& spec);

struct FlowSpec {
  std::string id;
  std::string vtype;  // key into the scenario's vehicle sources
  std::string from;   // first edge
  /// Movement weights at the first intersection; empty means the route is
  /// just `from` (or `route` if given).
  std::map<Movement, double> turns;
  std::vector<std::string> route;  // explicit route, overrides from/turns
  double rate = 0.0;               // vehicles per hour, Poisson arrivals
  std::size_t count = 0;           // 0 = unlimited
  double begin = 0.0;              // s
  double end = -1.0;               // s, negative = until the end
};

struct SimulationConfig {
  double duration = 3600.0;  // s
  double dt = 1.0;           // s
  double tau = 1.0;          // s, reaction time
  double sigma = 0.1;        // dawdling
  double gap_acceptance = 4.0;  // s, direct left turns
  std::uint64_t seed = 1;
  bool record_trajectories = true;
  /// Stop early once every flow is exhausted and the network is empty.
  bool end_when_empty = true;
};

struct VehicleState {
  std::string id;
  std::string vtype_name;
  bool bicycle = true;
  VTypeParams vtype;
  std::vector<std::string> route;
  std::size_t edge_idx = 0;
  double pos = 0.0;
  double v = 0.0;
  std::optional<TurnPlan> turn_plan;
  double spawn_time = 0.0;
  std::uint64_t order = 0;  // spawn order
  double max_v = 0.0;
  double max_a = 0.0;
  double max_d = 0.0;
};

struct VehicleSummary {
  std::string vehicle_id;
  std::string vtype_name;
  bool bicycle = true;
  VTypeParams vtype;
  double max_v = 0.0;
  double max_a = 0.0;
  double max_d = 0.0;  // magnitude
  double spawn_t = 0.0;
  std::optional<double> retire_t;  // unset if still active at the end
  std::optional<TurnPlan> turn_plan;
};

struct ScenarioConfig {
  Network network;
  std::map<std::string, VehicleSource> vtypes;
  std::vector<FlowSpec> flows;
  SimulationConfig sim;

  /// Throws Error{ConfigError}.
  void validate() const;
};

class World {
 public:
  /// Throws Error{ConfigError}.
  explicit World(ScenarioConfig scenario);

  /// Advances by one step of `dt`.
  void step();
  /// Steps until the duration is reached (or the network empties).
  void run();
  bool finished() const;

  double time() const { return t_; }
  const Network& network() const { return scenario_.network; }
  const std::vector<VehicleState>& vehicles() const { return active_; }
  const std::vector<TrajectoryRecord>& records() const { return records_; }
  std::vector<VehicleSummary> summaries() const;

  /// Inserts a vehicle directly, bypassing the flows. Throws
  /// Error{ConfigError} for an unknown edge or an occupied position.
  void insert_vehicle(VehicleState vehicle);

 private:
  struct FlowState {
    Rng arrivals;
    Rng vtypes;
    Rng turns;
    double next_arrival = 0.0;
    std::size_t arrived = 0;
    std::size_t spawned = 0;
    std::size_t backlog = 0;
    std::optional<VehicleState> pending;
  };
  struct Constraint {
    double v_safe;
    double cap;  // hard bound from the gap, m/s
  };

  void spawn();
  VehicleState prepare(std::size_t flow_idx);
  bool entry_free(const VehicleState& v) const;
  void index_edges();
  Constraint constraint(const VehicleState& veh) const;
  bool line_blocked(const VehicleState& veh, std::size_t edge_pos, double dist_to_line) const;
  bool must_yield(const Connection& conn) const;
  void retire(VehicleState& veh, std::optional<double> t);
  bool flows_exhausted() const;

  ScenarioConfig scenario_;
  double t_ = 0.0;
  std::uint64_t next_order_ = 0;
  Rng dawdle_;
  std::vector<FlowState> flows_;
  std::vector<VehicleState> active_;
  std::vector<VehicleSummary> retired_;
  std::vector<TrajectoryRecord> records_;
  // edge id -> active vehicle indices ordered by position ascending
  std::map<std::string, std::vector<std::size_t>> on_edge_;
};

struct SimulationResult {
  std::vector<TrajectoryRecord> records;
  std::vector<VehicleSummary> summaries;
  double end_time = 0.0;
};

/// Throws Error{ConfigError}.
SimulationResult run_scenario(const ScenarioConfig& scenario);

/// `t,vehicle_id,edge,pos,v,a` with three decimals.
std::string trajectory_csv(const std::vector<TrajectoryRecord>& records);
/// Throws Error{MalformedFile}.
std::vector<TrajectoryRecord> parse_trajectory_csv(const std::string& content);
/// `vehicle_id,class,kind,max_v,max_a,max_d,spawn_t,retire_t`; kind is
/// bicycle or car.
std::string summary_csv(const std::vector<VehicleSummary>& summaries);

}  // namespace cycleflow
