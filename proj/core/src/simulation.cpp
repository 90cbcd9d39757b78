#include "cycleflow/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cycleflow/error.hpp"
#include "text_util.hpp"

namespace cycleflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLineEps = 1e-6;
constexpr double kLookahead = 300.0;  // m

enum Stream : std::uint64_t { kDawdle = 1, kArrivals = 1000, kVTypes = 2000, kTurns = 3000 };

/// Time to cover `d` starting at `v`, accelerating at `a` up to `vmax`.
double travel_time(double d, double v, double a, double vmax) {
  if (d <= 0.0) return 0.0;
  vmax = std::max(vmax, v);
  if (!(a > 0.0)) return v > 0.0 ? d / v : kInf;
  const double t_acc = (vmax - v) / a;
  const double d_acc = v * t_acc + 0.5 * a * t_acc * t_acc;
  if (d <= d_acc) return (-v + std::sqrt(v * v + 2.0 * a * d)) / a;
  return t_acc + (d - d_acc) / vmax;
}

const Connection* left_direct_into(const Network& net, const std::string& from, const std::string& next) {
  for (const auto* c : net.connections_from(from))
    if (c->via == ConnectionVia::LeftDirect && c->path.front() == next) return c;
  return nullptr;
}

}  // namespace

double krauss_safe_speed(double v, double gap, double v_leader, double d_max, double tau) {
  if (gap == kInf) return kInf;
  const double v_bar = 0.5 * (v + v_leader);
  return v_leader + (gap - v_leader * tau) / (v_bar / d_max + tau);
}

double krauss_update(double v, double v_safe, const VTypeParams& vtype, double dt, double sigma, Rng& rng) {
  const double v_des = std::min({v + vtype.a_max * dt, v_safe, vtype.v_max});
  const double eta = sigma > 0.0 ? rng.uniform(0.0, sigma * vtype.a_max * dt) : 0.0;
  return std::max(0.0, v_des - eta);
}

double krauss_step(double v, double gap, double v_leader, const VTypeParams& vtype, double dt, double sigma,
                   Rng& rng, double tau) {
  return krauss_update(v, krauss_safe_speed(v, gap, v_leader, vtype.d_max, tau), vtype, dt, sigma, rng);
}

std::string to_string(TurnKind k) { return k == TurnKind::Direct ? "direct" : "indirect"; }

TurnPlan plan_left_turn(const VTypeParams& vtype, Rng& rng) {
  TurnPlan plan;
  plan.kind = rng.bernoulli(vtype.p_indirect) ? TurnKind::Indirect : TurnKind::Direct;
  return plan;
}

std::string to_string(Movement m) {
  switch (m) {
    case Movement::Straight: return "straight";
    case Movement::Left: return "left";
    case Movement::Right: return "right";
  }
  return "straight";
}

Movement movement_from_string(const std::string& s) {
  for (const auto m : {Movement::Straight, Movement::Left, Movement::Right})
    if (to_string(m) == s) return m;
  throw Error(ErrorCode::ConfigError, "unknown movement '" + s + "'");
}

VTypeParams default_car_params() {
  VTypeParams p;
  p.a_max = 2.6;
  p.d_max = 4.5;
  p.v_max = 13.9;
  p.p_indirect = 0.0;
  p.min_gap = 2.5;
  p.length = 5.0;
  return p;
}

VehicleSource car_source(const VTypeParams& params) {
  VehicleSource s;
  s.bicycle = false;
  s.fixed = params;
  return s;
}

VehicleSource bicycle_source(const VTypeDistributionSpec& spec) {
  VehicleSource s;
  s.bicycle = true;
  s.spec = spec;
  return s;
}

void ScenarioConfig::validate() const {
  const auto& c = sim;
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw Error(ErrorCode::ConfigError, "dt must be positive");
  if (!(c.duration >= 0.0) || !std::isfinite(c.duration))
    throw Error(ErrorCode::ConfigError, "duration must be non-negative");
  if (!(c.tau > 0.0)) throw Error(ErrorCode::ConfigError, "tau must be positive");
  if (!(c.sigma >= 0.0 && c.sigma <= 1.0)) throw Error(ErrorCode::ConfigError, "sigma must lie in [0, 1]");
  if (!(c.gap_acceptance >= 0.0)) throw Error(ErrorCode::ConfigError, "gap acceptance must be non-negative");

  for (const auto& [name, src] : vtypes) {
    try {
      if (src.bicycle) {
        src.spec.validate();
      } else {
        const auto& p = src.fixed;
        if (!(p.a_max > 0.0 && p.d_max > 0.0 && p.v_max > 0.0 && p.length > 0.0 && p.min_gap >= 0.0))
          throw Error(ErrorCode::ConfigError, "car parameters must be positive");
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, "vtype " + name + ": " + e.what());
    }
  }

  std::set<std::string> ids;
  for (const auto& f : flows) {
    if (f.id.empty() || !ids.insert(f.id).second)
      throw Error(ErrorCode::ConfigError, "flow ids must be unique and non-empty");
    if (!vtypes.count(f.vtype)) throw Error(ErrorCode::ConfigError, "flow " + f.id + ": unknown vtype " + f.vtype);
    if (!(f.rate >= 0.0) || !std::isfinite(f.rate))
      throw Error(ErrorCode::ConfigError, "flow " + f.id + ": rate must be non-negative");
    if (!(f.begin >= 0.0)) throw Error(ErrorCode::ConfigError, "flow " + f.id + ": begin must be non-negative");
    if (!f.route.empty()) {
      for (const auto& e : f.route)
        if (!network.has_edge(e)) throw Error(ErrorCode::ConfigError, "flow " + f.id + ": unknown edge " + e);
      continue;
    }
    if (!network.has_edge(f.from)) throw Error(ErrorCode::ConfigError, "flow " + f.id + ": unknown edge " + f.from);
    double total = 0.0;
    for (const auto& [m, w] : f.turns) {
      if (!(w >= 0.0)) throw Error(ErrorCode::ConfigError, "flow " + f.id + ": negative turn weight");
      total += w;
      if (w == 0.0) continue;
      const bool ok = m == Movement::Left ? network.has_movement(f.from, ConnectionVia::LeftDirect) ||
                                                network.has_movement(f.from, ConnectionVia::LeftIndirectLeg1)
                      : m == Movement::Right ? network.has_movement(f.from, ConnectionVia::Right)
                                             : network.has_movement(f.from, ConnectionVia::Straight);
      if (!ok) throw Error(ErrorCode::ConfigError, "flow " + f.id + ": no " + to_string(m) + " movement from " + f.from);
    }
    if (!f.turns.empty() && !(total > 0.0))
      throw Error(ErrorCode::ConfigError, "flow " + f.id + ": turn weights sum to zero");
  }
}

World::World(ScenarioConfig scenario)
    : scenario_(std::move(scenario)), dawdle_(Rng::substream(scenario_.sim.seed, kDawdle)) {
  scenario_.validate();
  const auto seed = scenario_.sim.seed;
  for (std::size_t i = 0; i < scenario_.flows.size(); ++i) {
    FlowState fs{Rng::substream(seed, kArrivals + i), Rng::substream(seed, kVTypes + i),
                 Rng::substream(seed, kTurns + i), 0.0, 0, 0, 0, std::nullopt};
    const auto& f = scenario_.flows[i];
    fs.next_arrival = f.rate > 0.0 ? f.begin + fs.arrivals.exponential() * 3600.0 / f.rate : kInf;
    flows_.push_back(std::move(fs));
  }
}

bool World::flows_exhausted() const {
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const auto& fs = flows_[i];
    const auto& f = scenario_.flows[i];
    if (fs.backlog > 0 || fs.pending) return false;
    const bool counted_out = f.count > 0 && fs.arrived >= f.count;
    const bool past_end = f.end >= 0.0 && fs.next_arrival >= f.end;
    if (!counted_out && !past_end && fs.next_arrival != kInf) return false;
  }
  return true;
}

bool World::finished() const {
  if (t_ >= scenario_.sim.duration - 1e-9) return true;
  return scenario_.sim.end_when_empty && active_.empty() && flows_exhausted();
}

void World::run() {
  while (!finished()) step();
}

VehicleState World::prepare(std::size_t flow_idx) {
  auto& fs = flows_[flow_idx];
  const auto& f = scenario_.flows[flow_idx];
  const auto& src = scenario_.vtypes.at(f.vtype);
  const auto& net = scenario_.network;

  VehicleState v;
  v.id = f.id + "." + std::to_string(fs.spawned);
  v.vtype_name = f.vtype;
  v.bicycle = src.bicycle;
  v.vtype = src.bicycle ? sample_vtype(src.spec, fs.vtypes) : src.fixed;

  if (!f.route.empty()) {
    v.route = f.route;
    return v;
  }
  if (f.turns.empty()) {
    v.route = {f.from};
    return v;
  }
  double total = 0.0;
  for (const auto& [m, w] : f.turns) total += w;
  double u = fs.turns.uniform() * total;
  Movement movement = f.turns.rbegin()->first;
  for (const auto& [m, w] : f.turns) {
    if (w > 0.0 && u < w) {
      movement = m;
      break;
    }
    u -= w;
  }
  if (movement == Movement::Straight) {
    v.route = net.route(f.from, ConnectionVia::Straight);
    return v;
  }
  if (movement == Movement::Right) {
    v.route = net.route(f.from, ConnectionVia::Right);
    return v;
  }

  const bool has_direct = net.has_movement(f.from, ConnectionVia::LeftDirect);
  const bool has_indirect = net.has_movement(f.from, ConnectionVia::LeftIndirectLeg1);
  TurnPlan plan;
  if (v.bicycle && has_direct && has_indirect) {
    plan = plan_left_turn(v.vtype, fs.turns);
  } else {
    plan.kind = has_direct ? TurnKind::Direct : TurnKind::Indirect;
  }
  v.route = net.route(f.from, plan.kind == TurnKind::Direct ? ConnectionVia::LeftDirect
                                                             : ConnectionVia::LeftIndirectLeg1);
  const auto& first = net.edge(f.from);
  plan.node = first.stop_control ? first.stop_control->node : first.to;
  plan.edges.assign(v.route.begin() + 1, v.route.end() - 1);
  if (plan.kind == TurnKind::Indirect) plan.wait_node = net.edge(plan.edges.front()).to;
  v.turn_plan = std::move(plan);
  return v;
}

bool World::entry_free(const VehicleState& v) const {
  for (const auto& o : active_) {
    if (o.route[o.edge_idx] != v.route.front()) continue;
    if (o.pos - o.vtype.length < v.vtype.min_gap) return false;
  }
  return true;
}

void World::insert_vehicle(VehicleState vehicle) {
  if (vehicle.route.empty()) throw Error(ErrorCode::ConfigError, "vehicle needs a route");
  for (const auto& e : vehicle.route)
    if (!scenario_.network.has_edge(e)) throw Error(ErrorCode::ConfigError, "unknown edge " + e);
  if (vehicle.edge_idx >= vehicle.route.size()) throw Error(ErrorCode::ConfigError, "edge index past route end");
  const auto& edge = scenario_.network.edge(vehicle.route[vehicle.edge_idx]);
  if (vehicle.pos < 0.0 || vehicle.pos > edge.length)
    throw Error(ErrorCode::ConfigError, "position outside edge " + edge.id);
  for (const auto& o : active_) {
    if (o.route[o.edge_idx] != edge.id) continue;
    const bool overlap = vehicle.pos > o.pos - o.vtype.length && o.pos > vehicle.pos - vehicle.vtype.length;
    if (overlap) throw Error(ErrorCode::ConfigError, "vehicle " + vehicle.id + " overlaps " + o.id);
  }
  vehicle.order = next_order_++;
  vehicle.spawn_time = t_;
  active_.push_back(std::move(vehicle));
}

void World::spawn() {
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    auto& fs = flows_[i];
    const auto& f = scenario_.flows[i];
    while (fs.next_arrival <= t_ + 1e-9 && (f.count == 0 || fs.arrived < f.count) &&
           (f.end < 0.0 || fs.next_arrival < f.end)) {
      ++fs.arrived;
      ++fs.backlog;
      fs.next_arrival += fs.arrivals.exponential() * 3600.0 / f.rate;
    }
    if (f.count > 0 && fs.arrived >= f.count) fs.next_arrival = kInf;
    if (fs.backlog == 0) continue;
    if (!fs.pending) fs.pending = prepare(i);
    if (!entry_free(*fs.pending)) continue;
    auto v = std::move(*fs.pending);
    fs.pending.reset();
    --fs.backlog;
    ++fs.spawned;
    v.order = next_order_++;
    v.spawn_time = t_;
    active_.push_back(std::move(v));
  }
}

void World::index_edges() {
  on_edge_.clear();
  for (std::size_t i = 0; i < active_.size(); ++i) on_edge_[active_[i].route[active_[i].edge_idx]].push_back(i);
  for (auto& [id, list] : on_edge_) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      if (active_[a].pos != active_[b].pos) return active_[a].pos < active_[b].pos;
      return active_[a].order > active_[b].order;
    });
  }
}

bool World::must_yield(const Connection& conn) const {
  const auto& net = scenario_.network;
  const double horizon = scenario_.sim.gap_acceptance;
  for (const auto& y : conn.yield_to) {
    const double half = 0.5 * net.edge(y).length;
    if (const auto it = on_edge_.find(y); it != on_edge_.end()) {
      for (const auto idx : it->second) {
        const auto& o = active_[idx];
        if (o.pos < half && travel_time(half - o.pos, o.v, o.vtype.a_max, o.vtype.v_max) < horizon) return true;
      }
    }
    for (const auto& c : net.connections) {
      if (c.path.front() != y) continue;
      const auto& approach = net.edge(c.from_edge);
      if (approach.stop_control) {
        const auto& prog = net.program(approach.stop_control->node);
        if (signal_state_at(prog, t_, approach.stop_control->approach) == SignalState::Red) continue;
      }
      const auto it = on_edge_.find(approach.id);
      if (it == on_edge_.end()) continue;
      // Front to back; a vehicle bound elsewhere holds up everything behind it.
      for (auto r = it->second.rbegin(); r != it->second.rend(); ++r) {
        const auto& o = active_[*r];
        if (o.edge_idx + 1 >= o.route.size()) break;
        const auto& next = o.route[o.edge_idx + 1];
        if (std::find(conn.yield_to.begin(), conn.yield_to.end(), next) == conn.yield_to.end()) break;
        const double d = approach.length - o.pos + 0.5 * net.edge(next).length;
        if (travel_time(d, o.v, o.vtype.a_max, o.vtype.v_max) < horizon) return true;
      }
    }
  }
  return false;
}

bool World::line_blocked(const VehicleState& veh, std::size_t edge_pos, double dist_to_line) const {
  const auto& net = scenario_.network;
  const auto& e = net.edge(veh.route[edge_pos]);
  const auto& ctrl = *e.stop_control;
  const auto state = signal_state_at(net.program(ctrl.node), t_, ctrl.approach);
  if (state == SignalState::Red) return true;
  // Amber and yielding only hold back vehicles that can still stop
  // comfortably; the others are committed.
  const double v_stop = krauss_safe_speed(veh.v, dist_to_line - kLineEps, 0.0, veh.vtype.d_max, scenario_.sim.tau);
  const bool can_stop = v_stop >= veh.v - veh.vtype.d_max * scenario_.sim.dt;
  if (!can_stop) return false;
  if (state == SignalState::Amber) return true;
  if (const auto* conn = left_direct_into(net, e.id, veh.route[edge_pos + 1])) return must_yield(*conn);
  return false;
}

World::Constraint World::constraint(const VehicleState& veh) const {
  const auto& net = scenario_.network;
  const double tau = scenario_.sim.tau;
  const double dt = scenario_.sim.dt;
  Constraint c{kInf, kInf};
  auto apply = [&](double gap, double v_leader) {
    c.v_safe = std::min(c.v_safe, krauss_safe_speed(veh.v, gap, v_leader, veh.vtype.d_max, tau));
    c.cap = std::min(c.cap, std::max(0.0, gap) / dt);
  };

  double ahead = -veh.pos;
  for (std::size_t j = veh.edge_idx; j < veh.route.size(); ++j) {
    const auto& e = net.edge(veh.route[j]);
    if (const auto it = on_edge_.find(e.id); it != on_edge_.end()) {
      const VehicleState* leader = nullptr;
      for (const auto idx : it->second) {
        const auto& o = active_[idx];
        if (&o == &veh) continue;
        const bool in_front = j > veh.edge_idx || o.pos > veh.pos || (o.pos == veh.pos && o.order < veh.order);
        if (in_front) {
          leader = &o;
          break;
        }
      }
      if (leader) {
        apply(ahead + leader->pos - leader->vtype.length - veh.vtype.min_gap, leader->v);
        return c;
      }
    }
    if (j == veh.edge_idx && e.internal && j + 1 < veh.route.size()) {
      const double d_me = e.length - veh.pos;
      for (const auto& f : net.feeders(veh.route[j + 1])) {
        if (f == e.id) continue;
        const auto it = on_edge_.find(f);
        if (it == on_edge_.end()) continue;
        const double len = net.edge(f).length;
        for (const auto idx : it->second) {
          const auto& o = active_[idx];
          const double d_o = len - o.pos;
          if (d_o < d_me || (d_o == d_me && o.order < veh.order))
            apply(d_me - d_o - o.vtype.length - veh.vtype.min_gap, o.v);
        }
      }
    }
    if (e.stop_control && j + 1 < veh.route.size()) {
      const double dist = ahead + e.length;
      // Keep scanning: a leader just past the line may still overhang it.
      if (line_blocked(veh, j, dist)) apply(dist - kLineEps, 0.0);
    }
    ahead += e.length;
    if (ahead > kLookahead) break;
  }
  return c;
}

void World::retire(VehicleState& veh, std::optional<double> t) {
  VehicleSummary s;
  s.vehicle_id = veh.id;
  s.vtype_name = veh.vtype_name;
  s.bicycle = veh.bicycle;
  s.vtype = veh.vtype;
  s.max_v = veh.max_v;
  s.max_a = veh.max_a;
  s.max_d = veh.max_d;
  s.spawn_t = veh.spawn_time;
  s.retire_t = t;
  s.turn_plan = veh.turn_plan;
  retired_.push_back(std::move(s));
}

void World::step() {
  const auto& net = scenario_.network;
  const double dt = scenario_.sim.dt;
  spawn();
  index_edges();

  std::vector<double> next_v(active_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) {
    const auto& veh = active_[i];
    const auto c = constraint(veh);
    auto vt = veh.vtype;
    vt.v_max = std::min(vt.v_max, net.edge(veh.route[veh.edge_idx]).speed_limit);
    next_v[i] = std::min(krauss_update(veh.v, c.v_safe, vt, dt, scenario_.sim.sigma, dawdle_), c.cap);
  }

  const double t_next = t_ + dt;
  std::vector<VehicleState> still;
  still.reserve(active_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) {
    auto& veh = active_[i];
    const double a = (next_v[i] - veh.v) / dt;
    veh.v = next_v[i];
    veh.max_v = std::max(veh.max_v, veh.v);
    veh.max_a = std::max(veh.max_a, a);
    veh.max_d = std::max(veh.max_d, -a);
    veh.pos += veh.v * dt;
    bool done = false;
    while (veh.pos > net.edge(veh.route[veh.edge_idx]).length) {
      veh.pos -= net.edge(veh.route[veh.edge_idx]).length;
      if (++veh.edge_idx == veh.route.size()) {
        done = true;
        break;
      }
    }
    if (done) {
      retire(veh, t_next);
      continue;
    }
    if (scenario_.sim.record_trajectories)
      records_.push_back({t_next, veh.id, veh.route[veh.edge_idx], veh.pos, veh.v, a});
    still.push_back(std::move(veh));
  }
  active_ = std::move(still);
  t_ = t_next;
}

std::vector<VehicleSummary> World::summaries() const {
  auto out = retired_;
  for (auto veh : active_) {
    VehicleSummary s;
    s.vehicle_id = veh.id;
    s.vtype_name = veh.vtype_name;
    s.bicycle = veh.bicycle;
    s.vtype = veh.vtype;
    s.max_v = veh.max_v;
    s.max_a = veh.max_a;
    s.max_d = veh.max_d;
    s.spawn_t = veh.spawn_time;
    s.turn_plan = veh.turn_plan;
    out.push_back(std::move(s));
  }
  return out;
}

SimulationResult run_scenario(const ScenarioConfig& scenario) {
  World world(scenario);
  world.run();
  SimulationResult r;
  r.records = world.records();
  r.summaries = world.summaries();
  r.end_time = world.time();
  return r;
}

std::string trajectory_csv(const std::vector<TrajectoryRecord>& records) {
  std::string out = "t,vehicle_id,edge,pos,v,a\n";
  out.reserve(records.size() * 40);
  for (const auto& r : records) {
    out += detail::fixed(r.t, 3);
    out += ',';
    out += r.vehicle_id;
    out += ',';
    out += r.edge;
    out += ',';
    out += detail::fixed(r.pos, 3);
    out += ',';
    out += detail::fixed(r.v, 3);
    out += ',';
    out += detail::fixed(r.a, 3);
    out += '\n';
  }
  return out;
}

std::vector<TrajectoryRecord> parse_trajectory_csv(const std::string& content) {
  const auto lines = detail::split_lines(content);
  if (lines.empty() || detail::trim(lines.front()) != "t,vehicle_id,edge,pos,v,a")
    throw Error(ErrorCode::MalformedFile, "trajectory header must be t,vehicle_id,edge,pos,v,a");
  std::vector<TrajectoryRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto f = detail::split(lines[i], ',');
    if (f.size() != 6) throw Error(ErrorCode::MalformedFile, "line " + std::to_string(i + 1) + ": expected 6 fields");
    TrajectoryRecord r;
    const auto t = detail::parse_double(f[0]);
    const auto pos = detail::parse_double(f[3]);
    const auto v = detail::parse_double(f[4]);
    const auto a = detail::parse_double(f[5]);
    if (!t || !pos || !v || !a) throw Error(ErrorCode::MalformedFile, "line " + std::to_string(i + 1) + ": bad number");
    r.t = *t;
    r.vehicle_id = std::string(detail::trim(f[1]));
    r.edge = std::string(detail::trim(f[2]));
    r.pos = *pos;
    r.v = *v;
    r.a = *a;
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_csv(const std::vector<VehicleSummary>& summaries) {
  std::string out = "vehicle_id,class,kind,max_v,max_a,max_d,spawn_t,retire_t\n";
  for (const auto& s : summaries) {
    out += s.vehicle_id + "," + s.vtype_name + "," + (s.bicycle ? "bicycle" : "car") + "," +
           detail::fixed(s.max_v, 3) + "," + detail::fixed(s.max_a, 3) +
           "," + detail::fixed(s.max_d, 3) + "," + detail::fixed(s.spawn_t, 3) + "," +
           (s.retire_t ? detail::fixed(*s.retire_t, 3) : std::string()) + "\n";
  }
  return out;
}

}  // namespace cycleflow
