#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cycleflow {

enum class LaneKind { Road, BikeLane };
std::string to_string(LaneKind k);
LaneKind lane_kind_from_string(const std::string& s);

enum class ConnectionVia { Straight, LeftDirect, LeftIndirectLeg1, LeftIndirectLeg2, Right };
std::string to_string(ConnectionVia v);
ConnectionVia connection_via_from_string(const std::string& s);

struct Node {
  std::string id;
  double x = 0.0;  // m
  double y = 0.0;  // m
};

/// Signal that governs the stop line at an edge's downstream end.
struct StopControl {
  std::string node;      // signal program node
  std::string approach;  // approach id looked up in that program
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;  // m
  LaneKind lane_kind = LaneKind::Road;
  double speed_limit = 13.9;  // m/s
  bool internal = false;      // inside an intersection box
  std::optional<StopControl> stop_control;
};

/// Movement from an approach (or a first indirect leg) through a chain of
/// internal edges onto `to_edge`.
struct Connection {
  std::string from_edge;
  std::string to_edge;
  ConnectionVia via = ConnectionVia::Straight;
  std::vector<std::string> path;
  /// Internal edges of oncoming movements this one must yield to.
  std::vector<std::string> yield_to;
};

struct Phase {
  double duration = 0.0;  // s
  std::set<std::string> green;
};

/// Fixed-time program. The last `amber` seconds of each phase are amber for
/// that phase's green set.
struct SignalProgram {
  std::string node;
  std::vector<Phase> phases;
  double amber = 0.0;  // s

  double cycle() const;
  std::set<std::string> approaches() const;
  /// Throws Error{InvalidSpec}.
  void validate() const;
};

enum class SignalState { Green, Amber, Red };
std::string to_string(SignalState s);

/// Phase by t mod cycle. Throws Error{UnknownApproach} when no phase lists
/// `approach`, Error{InvalidSpec} for t < 0.
SignalState signal_state_at(const SignalProgram& program, double t, const std::string& approach);

class Network {
 public:
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<Connection> connections;
  std::vector<SignalProgram> signal_programs;

  /// Checks lengths, references and signal coverage; builds the lookup
  /// indices. Throws Error{InvalidSpec}.
  void finalize();

  const Edge& edge(const std::string& id) const;
  bool has_edge(const std::string& id) const { return edge_index_.count(id) != 0; }
  const SignalProgram& program(const std::string& node) const;
  std::vector<const Connection*> connections_from(const std::string& edge_id) const;
  /// Internal edges whose successor is `edge_id` on some connection.
  const std::vector<std::string>& feeders(const std::string& edge_id) const;

  /// Full edge list for a movement; for LeftIndirectLeg1 the two legs are
  /// chained. Throws Error{InvalidSpec} if the movement does not exist.
  std::vector<std::string> route(const std::string& from_edge, ConnectionVia via) const;
  bool has_movement(const std::string& from_edge, ConnectionVia via) const;

 private:
  std::map<std::string, std::size_t> edge_index_;
  std::map<std::string, std::size_t> program_index_;
  std::map<std::string, std::vector<std::string>> feeders_;
};

/// One bike_lane edge `corridor`, no signals. Throws Error{InvalidSpec}.
Network build_straight_corridor(double length, double speed_limit = 13.9);

struct FourWaySpec {
  double arm_length = 200.0;      // m
  double speed_limit = 13.9;      // m/s
  double box_half_width = 10.0;   // m, stop lines sit on the box border
  double lane_offset = 2.0;       // m, lane centre from road axis
  double amber = 3.0;             // s
  std::vector<Phase> phases = {{30.0, {"in_N", "in_S"}}, {30.0, {"in_E", "in_W"}}};
};

/// Right-hand traffic intersection at the origin with arms N, E, S, W.
/// Per arm X: approach `in_X`, exit `out_X`, and internal edges
/// `X_straight`, `X_right`, `X_left` (direct) and `X_leg1`, `X_leg2`
/// (indirect). `X_leg1` crosses straight to a wait node whose stop line
/// follows the signal of the approach travelling in the leg-2 direction.
/// Throws Error{InvalidSpec}.
Network build_four_way_intersection(const FourWaySpec& spec = {});

}  // namespace cycleflow
