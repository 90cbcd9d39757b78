#include "cycleflow/network.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "cycleflow/error.hpp"

namespace cycleflow {
namespace {

struct Vec {
  double x = 0.0;
  double y = 0.0;
};

Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }
Vec operator-(Vec a) { return {-a.x, -a.y}; }
double distance(Vec a, Vec b) { return std::hypot(a.x - b.x, a.y - b.y); }
double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y; }
/// Right-hand normal of a heading.
Vec right_of(Vec h) { return {h.y, -h.x}; }

struct Arm {
  const char* name;
  Vec out;  // unit vector from the centre toward the arm
};

// Clockwise order: the arm after X is on X's left when approaching from X.
constexpr std::array<Arm, 4> kArms = {{{"N", {0, 1}}, {"E", {1, 0}}, {"S", {0, -1}}, {"W", {-1, 0}}}};

std::size_t straight_of(std::size_t i) { return (i + 2) % 4; }
std::size_t right_turn_of(std::size_t i) { return (i + 3) % 4; }
std::size_t left_turn_of(std::size_t i) { return (i + 1) % 4; }

bool is_ns(const std::string& approach) { return approach == "in_N" || approach == "in_S"; }
bool is_ew(const std::string& approach) { return approach == "in_E" || approach == "in_W"; }

}  // namespace

std::string to_string(LaneKind k) { return k == LaneKind::Road ? "road" : "bike_lane"; }

LaneKind lane_kind_from_string(const std::string& s) {
  if (s == "road") return LaneKind::Road;
  if (s == "bike_lane") return LaneKind::BikeLane;
  throw Error(ErrorCode::InvalidSpec, "unknown lane kind '" + s + "'");
}

std::string to_string(ConnectionVia v) {
  switch (v) {
    case ConnectionVia::Straight: return "straight";
    case ConnectionVia::LeftDirect: return "left_direct";
    case ConnectionVia::LeftIndirectLeg1: return "left_indirect_leg1";
    case ConnectionVia::LeftIndirectLeg2: return "left_indirect_leg2";
    case ConnectionVia::Right: return "right";
  }
  return "straight";
}

ConnectionVia connection_via_from_string(const std::string& s) {
  for (const auto v : {ConnectionVia::Straight, ConnectionVia::LeftDirect, ConnectionVia::LeftIndirectLeg1,
                       ConnectionVia::LeftIndirectLeg2, ConnectionVia::Right})
    if (to_string(v) == s) return v;
  throw Error(ErrorCode::InvalidSpec, "unknown connection kind '" + s + "'");
}

std::string to_string(SignalState s) {
  switch (s) {
    case SignalState::Green: return "green";
    case SignalState::Amber: return "amber";
    case SignalState::Red: return "red";
  }
  return "red";
}

double SignalProgram::cycle() const {
  double c = 0.0;
  for (const auto& p : phases) c += p.duration;
  return c;
}

std::set<std::string> SignalProgram::approaches() const {
  std::set<std::string> all;
  for (const auto& p : phases) all.insert(p.green.begin(), p.green.end());
  return all;
}

void SignalProgram::validate() const {
  if (phases.empty()) throw Error(ErrorCode::InvalidSpec, "signal program at " + node + " has no phases");
  if (!(amber >= 0.0)) throw Error(ErrorCode::InvalidSpec, "amber must be non-negative");
  for (const auto& p : phases) {
    if (!(p.duration > 0.0) || !std::isfinite(p.duration))
      throw Error(ErrorCode::InvalidSpec, "phase durations must be positive");
    if (!(amber < p.duration)) throw Error(ErrorCode::InvalidSpec, "amber must be shorter than every phase");
  }
}

SignalState signal_state_at(const SignalProgram& program, double t, const std::string& approach) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidSpec, "signal time must be non-negative");
  bool known = false;
  for (const auto& p : program.phases) known = known || p.green.count(approach) != 0;
  if (!known) throw Error(ErrorCode::UnknownApproach, "approach '" + approach + "' not in program " + program.node);

  double in_cycle = std::fmod(t, program.cycle());
  for (const auto& p : program.phases) {
    if (in_cycle < p.duration) {
      if (p.green.count(approach) == 0) return SignalState::Red;
      return in_cycle < p.duration - program.amber ? SignalState::Green : SignalState::Amber;
    }
    in_cycle -= p.duration;
  }
  // Rounding can leave in_cycle a hair past the last boundary.
  const auto& first = program.phases.front();
  if (first.green.count(approach) == 0) return SignalState::Red;
  return first.duration > program.amber ? SignalState::Green : SignalState::Amber;
}

void Network::finalize() {
  edge_index_.clear();
  program_index_.clear();
  feeders_.clear();
  std::set<std::string> node_ids;
  for (const auto& n : nodes)
    if (!node_ids.insert(n.id).second) throw Error(ErrorCode::InvalidSpec, "duplicate node " + n.id);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw Error(ErrorCode::InvalidSpec, "edge " + e.id + " must have positive length");
    if (!(e.speed_limit > 0.0)) throw Error(ErrorCode::InvalidSpec, "edge " + e.id + " needs a positive speed limit");
    if (!node_ids.count(e.from) || !node_ids.count(e.to))
      throw Error(ErrorCode::InvalidSpec, "edge " + e.id + " references an unknown node");
    if (!edge_index_.emplace(e.id, i).second) throw Error(ErrorCode::InvalidSpec, "duplicate edge " + e.id);
  }
  for (std::size_t i = 0; i < signal_programs.size(); ++i) {
    const auto& p = signal_programs[i];
    p.validate();
    if (!node_ids.count(p.node)) throw Error(ErrorCode::InvalidSpec, "signal program at unknown node " + p.node);
    if (!program_index_.emplace(p.node, i).second)
      throw Error(ErrorCode::InvalidSpec, "two signal programs at node " + p.node);
  }
  for (const auto& e : edges) {
    if (!e.stop_control) continue;
    const auto it = program_index_.find(e.stop_control->node);
    if (it == program_index_.end())
      throw Error(ErrorCode::InvalidSpec, "edge " + e.id + " is controlled by a node without a program");
    if (!signal_programs[it->second].approaches().count(e.stop_control->approach))
      throw Error(ErrorCode::InvalidSpec, "program at " + e.stop_control->node + " does not cover approach " +
                                              e.stop_control->approach);
  }
  for (const auto& c : connections) {
    if (!has_edge(c.from_edge) || !has_edge(c.to_edge))
      throw Error(ErrorCode::InvalidSpec, "connection references an unknown edge");
    if (c.path.empty()) throw Error(ErrorCode::InvalidSpec, "connection from " + c.from_edge + " has no path");
    for (const auto& id : c.path)
      if (!has_edge(id)) throw Error(ErrorCode::InvalidSpec, "connection path uses unknown edge " + id);
    for (const auto& id : c.yield_to)
      if (!has_edge(id)) throw Error(ErrorCode::InvalidSpec, "connection yields to unknown edge " + id);
    auto& f = feeders_[c.to_edge];
    if (std::find(f.begin(), f.end(), c.path.back()) == f.end()) f.push_back(c.path.back());
  }
}

const Edge& Network::edge(const std::string& id) const {
  const auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw Error(ErrorCode::InvalidSpec, "unknown edge " + id);
  return edges[it->second];
}

const SignalProgram& Network::program(const std::string& node) const {
  const auto it = program_index_.find(node);
  if (it == program_index_.end()) throw Error(ErrorCode::InvalidSpec, "no signal program at " + node);
  return signal_programs[it->second];
}

std::vector<const Connection*> Network::connections_from(const std::string& edge_id) const {
  std::vector<const Connection*> out;
  for (const auto& c : connections)
    if (c.from_edge == edge_id) out.push_back(&c);
  return out;
}

const std::vector<std::string>& Network::feeders(const std::string& edge_id) const {
  static const std::vector<std::string> kNone;
  const auto it = feeders_.find(edge_id);
  return it == feeders_.end() ? kNone : it->second;
}

bool Network::has_movement(const std::string& from_edge, ConnectionVia via) const {
  for (const auto* c : connections_from(from_edge))
    if (c->via == via) return true;
  return false;
}

std::vector<std::string> Network::route(const std::string& from_edge, ConnectionVia via) const {
  const Connection* first = nullptr;
  for (const auto* c : connections_from(from_edge))
    if (c->via == via) first = c;
  if (!first) throw Error(ErrorCode::InvalidSpec, "no " + to_string(via) + " movement from " + from_edge);
  std::vector<std::string> r{from_edge};
  r.insert(r.end(), first->path.begin(), first->path.end());
  if (via != ConnectionVia::LeftIndirectLeg1) {
    r.push_back(first->to_edge);
    return r;
  }
  const Connection* second = nullptr;
  for (const auto* c : connections_from(first->path.back()))
    if (c->via == ConnectionVia::LeftIndirectLeg2) second = c;
  if (!second) throw Error(ErrorCode::InvalidSpec, "indirect turn from " + from_edge + " lacks its second leg");
  r.insert(r.end(), second->path.begin(), second->path.end());
  r.push_back(second->to_edge);
  return r;
}

Network build_straight_corridor(double length, double speed_limit) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorCode::InvalidSpec, "corridor length must be positive");
  if (!(speed_limit > 0.0)) throw Error(ErrorCode::InvalidSpec, "speed limit must be positive");
  Network net;
  net.nodes = {{"start", 0.0, 0.0}, {"end", length, 0.0}};
  Edge e;
  e.id = "corridor";
  e.from = "start";
  e.to = "end";
  e.length = length;
  e.lane_kind = LaneKind::BikeLane;
  e.speed_limit = speed_limit;
  net.edges.push_back(e);
  net.finalize();
  return net;
}

Network build_four_way_intersection(const FourWaySpec& spec) {
  const double w = spec.box_half_width;
  const double o = spec.lane_offset;
  if (!(spec.arm_length > 0.0) || !std::isfinite(spec.arm_length))
    throw Error(ErrorCode::InvalidSpec, "arm length must be positive");
  if (!(w > 0.0) || !(o >= 0.0) || !(o < w))
    throw Error(ErrorCode::InvalidSpec, "need box half-width > lane offset >= 0");
  if (spec.phases.size() < 2) throw Error(ErrorCode::InvalidSpec, "four-way program needs at least two phases");
  for (const auto& p : spec.phases) {
    bool ns = false, ew = false;
    for (const auto& a : p.green) {
      if (!is_ns(a) && !is_ew(a)) throw Error(ErrorCode::InvalidSpec, "phase lists unknown approach " + a);
      ns = ns || is_ns(a);
      ew = ew || is_ew(a);
    }
    if (ns && ew) throw Error(ErrorCode::InvalidSpec, "a phase makes perpendicular approaches green together");
  }

  Network net;
  net.nodes.push_back({"C", 0.0, 0.0});
  auto add_node = [&](const std::string& id, Vec p) { net.nodes.push_back({id, p.x, p.y}); };
  auto add_edge = [&](const std::string& id, const std::string& from, const std::string& to, double length,
                      bool internal) -> Edge& {
    Edge e;
    e.id = id;
    e.from = from;
    e.to = to;
    e.length = length;
    e.speed_limit = spec.speed_limit;
    e.internal = internal;
    net.edges.push_back(e);
    return net.edges.back();
  };

  // Lane end points on the box border.
  std::array<Vec, 4> stop{}, exit{}, wait{};
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec u = kArms[i].out;
    stop[i] = w * u + o * right_of(-u);
    exit[i] = w * u + o * right_of(u);
  }
  // An indirect turner waits where its approach lane crosses the exit lane
  // of its left arm.
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec ahead = -kArms[i].out;
    const Vec to_exit = exit[left_turn_of(i)] + (-1.0) * stop[i];
    wait[i] = stop[i] + dot(to_exit, ahead) * ahead;
  }

  for (std::size_t i = 0; i < 4; ++i) {
    const std::string x = kArms[i].name;
    const Vec u = kArms[i].out;
    add_node(x + "_origin", stop[i] + spec.arm_length * u);
    add_node(x + "_stop", stop[i]);
    add_node(x + "_exit", exit[i]);
    add_node(x + "_dest", exit[i] + spec.arm_length * u);
    add_node(x + "_wait", wait[i]);
  }

  for (std::size_t i = 0; i < 4; ++i) {
    const std::string x = kArms[i].name;
    add_edge("in_" + x, x + "_origin", x + "_stop", spec.arm_length, false).stop_control = StopControl{"C", "in_" + x};
    add_edge("out_" + x, x + "_exit", x + "_dest", spec.arm_length, false);
  }

  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string x = kArms[i].name;
    const std::size_t s = straight_of(i), r = right_turn_of(i), l = left_turn_of(i);
    const std::string xs = kArms[s].name, xr = kArms[r].name, xl = kArms[l].name;

    add_edge(x + "_straight", x + "_stop", xs + "_exit", distance(stop[i], exit[s]), true);
    add_edge(x + "_right", x + "_stop", xr + "_exit", 0.5 * pi * (w - o), true);
    add_edge(x + "_left", x + "_stop", xl + "_exit", 0.5 * pi * (w + o), true);
    // Leg 2 runs with the approach opposite the exit arm, i.e. the arm on
    // the right.
    add_edge(x + "_leg1", x + "_stop", x + "_wait", distance(stop[i], wait[i]), true).stop_control =
        StopControl{"C", std::string("in_") + kArms[r].name};
    add_edge(x + "_leg2", x + "_wait", xl + "_exit", distance(wait[i], exit[l]), true);

    net.connections.push_back({"in_" + x, "out_" + xs, ConnectionVia::Straight, {x + "_straight"}, {}});
    net.connections.push_back({"in_" + x, "out_" + xr, ConnectionVia::Right, {x + "_right"}, {}});
    net.connections.push_back(
        {"in_" + x, "out_" + xl, ConnectionVia::LeftDirect, {x + "_left"}, {xs + "_straight", xs + "_right"}});
    net.connections.push_back({"in_" + x, x + "_leg2", ConnectionVia::LeftIndirectLeg1, {x + "_leg1"}, {}});
    net.connections.push_back({x + "_leg1", "out_" + xl, ConnectionVia::LeftIndirectLeg2, {x + "_leg2"}, {}});
  }

  SignalProgram program;
  program.node = "C";
  program.phases = spec.phases;
  program.amber = spec.amber;
  net.signal_programs.push_back(program);
  net.finalize();
  return net;
}

}  // namespace cycleflow
