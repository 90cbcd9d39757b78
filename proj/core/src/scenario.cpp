#include "cycleflow/scenario.hpp"

#include "cycleflow/error.hpp"

namespace cycleflow {
namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::ConfigError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? field<T>(j, key) : fallback;
}

std::vector<Phase> phases_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "phases must be a list");
  std::vector<Phase> out;
  for (const auto& p : j) out.push_back({field<double>(p, "duration"), field<std::set<std::string>>(p, "green")});
  return out;
}

Json phases_to_json(const std::vector<Phase>& phases) {
  Json arr = Json::array();
  for (const auto& p : phases) arr.push_back(Json{{"duration", p.duration}, {"green", p.green}});
  return arr;
}

/// Rewrites network build errors as configuration errors.
template <class Fn>
Network building(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSpec) throw Error(ErrorCode::ConfigError, e.what());
    throw;
  }
}

VTypeParams car_from_json(const Json& j) {
  auto p = default_car_params();
  p.a_max = field_or(j, "accel", p.a_max);
  p.d_max = field_or(j, "decel", p.d_max);
  p.v_max = field_or(j, "max_speed", p.v_max);
  p.min_gap = field_or(j, "min_gap", p.min_gap);
  p.length = field_or(j, "length", p.length);
  return p;
}

std::map<Movement, double> turns_from_json(const Json& j) {
  std::map<Movement, double> out;
  if (j.is_string()) {
    out[movement_from_string(j.get<std::string>())] = 1.0;
    return out;
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "turns must be a movement name or weights");
  for (const auto& [name, w] : j.items()) {
    if (!w.is_number()) throw Error(ErrorCode::ConfigError, "turn weights must be numbers");
    out[movement_from_string(name)] = w.get<double>();
  }
  return out;
}

}  // namespace

Json network_to_json(const Network& net) {
  Json j;
  j["nodes"] = Json::array();
  for (const auto& n : net.nodes) j["nodes"].push_back(Json{{"id", n.id}, {"x", n.x}, {"y", n.y}});
  j["edges"] = Json::array();
  for (const auto& e : net.edges) {
    Json ej{{"id", e.id},           {"from", e.from},
            {"to", e.to},           {"length", e.length},
            {"lane_kind", to_string(e.lane_kind)}, {"speed_limit", e.speed_limit},
            {"internal", e.internal}};
    if (e.stop_control) ej["signal"] = Json{{"node", e.stop_control->node}, {"approach", e.stop_control->approach}};
    j["edges"].push_back(ej);
  }
  j["connections"] = Json::array();
  for (const auto& c : net.connections)
    j["connections"].push_back(Json{
        {"from", c.from_edge}, {"to", c.to_edge}, {"via", to_string(c.via)}, {"path", c.path}, {"yield_to", c.yield_to}});
  j["signals"] = Json::array();
  for (const auto& p : net.signal_programs)
    j["signals"].push_back(Json{{"node", p.node}, {"amber", p.amber}, {"phases", phases_to_json(p.phases)}});
  return j;
}

Network network_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "network must be an object");
  if (j.contains("builder")) {
    const auto builder = field<std::string>(j, "builder");
    if (builder == "corridor")
      return building([&] {
        return build_straight_corridor(field<double>(j, "length"), field_or(j, "speed_limit", 13.9));
      });
    if (builder == "fourway") {
      FourWaySpec spec;
      spec.arm_length = field_or(j, "arm_length", spec.arm_length);
      spec.speed_limit = field_or(j, "speed_limit", spec.speed_limit);
      spec.box_half_width = field_or(j, "box_half_width", spec.box_half_width);
      spec.lane_offset = field_or(j, "lane_offset", spec.lane_offset);
      spec.amber = field_or(j, "amber", spec.amber);
      if (j.contains("phases")) spec.phases = phases_from_json(j["phases"]);
      return building([&] { return build_four_way_intersection(spec); });
    }
    throw Error(ErrorCode::ConfigError, "unknown network builder '" + builder + "'");
  }

  Network net;
  for (const auto& n : field<Json>(j, "nodes")) net.nodes.push_back({field<std::string>(n, "id"), field_or(n, "x", 0.0), field_or(n, "y", 0.0)});
  for (const auto& ej : field<Json>(j, "edges")) {
    Edge e;
    e.id = field<std::string>(ej, "id");
    e.from = field<std::string>(ej, "from");
    e.to = field<std::string>(ej, "to");
    e.length = field<double>(ej, "length");
    e.speed_limit = field_or(ej, "speed_limit", e.speed_limit);
    e.internal = field_or(ej, "internal", false);
    if (ej.contains("lane_kind")) {
      try {
        e.lane_kind = lane_kind_from_string(field<std::string>(ej, "lane_kind"));
      } catch (const Error& err) {
        throw Error(ErrorCode::ConfigError, err.what());
      }
    }
    if (ej.contains("signal"))
      e.stop_control = StopControl{field<std::string>(ej["signal"], "node"), field<std::string>(ej["signal"], "approach")};
    net.edges.push_back(std::move(e));
  }
  for (const auto& cj : field_or(j, "connections", Json::array())) {
    Connection c;
    c.from_edge = field<std::string>(cj, "from");
    c.to_edge = field<std::string>(cj, "to");
    try {
      c.via = connection_via_from_string(field<std::string>(cj, "via"));
    } catch (const Error& err) {
      throw Error(ErrorCode::ConfigError, err.what());
    }
    c.path = field<std::vector<std::string>>(cj, "path");
    c.yield_to = field_or(cj, "yield_to", std::vector<std::string>{});
    net.connections.push_back(std::move(c));
  }
  for (const auto& pj : field_or(j, "signals", Json::array())) {
    SignalProgram p;
    p.node = field<std::string>(pj, "node");
    p.amber = field_or(pj, "amber", 0.0);
    p.phases = phases_from_json(field<Json>(pj, "phases"));
    net.signal_programs.push_back(std::move(p));
  }
  return building([&] {
    net.finalize();
    return net;
  });
}

VehicleSource resolve_vtype(const std::string& name, const ClassModels* models) {
  if (models) {
    for (const auto& [cls, spec] : models->specs)
      if (to_string(cls) == name) return bicycle_source(spec);
  }
  if (name == "car") return car_source();
  if (name == "sumo_default") return bicycle_source(sumo_default_spec());
  for (const auto c : kAllClasses)
    if (to_string(c) == name)
      throw Error(ErrorCode::ConfigError, "vtype '" + name + "' needs a class model bundle");
  throw Error(ErrorCode::ConfigError, "unknown vtype '" + name + "'");
}

ScenarioConfig scenario_from_json(const Json& j, const ClassModels* models) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "scenario must be an object");
  ScenarioConfig sc;
  sc.network = network_from_json(field<Json>(j, "network"));
  auto& s = sc.sim;
  s.duration = field_or(j, "duration", s.duration);
  s.dt = field_or(j, "dt", s.dt);
  s.tau = field_or(j, "tau", s.tau);
  s.sigma = field_or(j, "sigma", s.sigma);
  s.gap_acceptance = field_or(j, "gap_acceptance", s.gap_acceptance);
  s.seed = field_or(j, "seed", s.seed);
  s.record_trajectories = field_or(j, "record_trajectories", s.record_trajectories);
  s.end_when_empty = field_or(j, "end_when_empty", s.end_when_empty);

  const auto vtypes = field_or(j, "vtypes", Json::object());
  for (const auto& [name, vj] : vtypes.items()) {
    const auto kind = field_or<std::string>(vj, "kind", "bicycle");
    if (kind == "car") {
      sc.vtypes[name] = car_source(car_from_json(vj));
    } else if (kind == "bicycle") {
      if (vj.contains("spec")) {
        sc.vtypes[name] = bicycle_source(spec_from_json(vj["spec"]));
      } else {
        sc.vtypes[name] = resolve_vtype(field_or<std::string>(vj, "class", "sumo_default"), models);
      }
    } else {
      throw Error(ErrorCode::ConfigError, "vtype kind must be car or bicycle");
    }
  }

  const auto flows = field_or(j, "flows", Json::array());
  if (!flows.is_array()) throw Error(ErrorCode::ConfigError, "flows must be a list");
  for (const auto& fj : flows) {
    FlowSpec f;
    f.id = field<std::string>(fj, "id");
    f.vtype = field<std::string>(fj, "vtype");
    f.route = field_or(fj, "route", std::vector<std::string>{});
    f.from = f.route.empty() ? field<std::string>(fj, "from") : f.route.front();
    if (fj.contains("turns")) f.turns = turns_from_json(fj["turns"]);
    f.rate = field<double>(fj, "rate");
    f.count = field_or<std::size_t>(fj, "count", 0);
    f.begin = field_or(fj, "begin", 0.0);
    f.end = field_or(fj, "end", -1.0);
    if (!sc.vtypes.count(f.vtype)) sc.vtypes[f.vtype] = resolve_vtype(f.vtype, models);
    sc.flows.push_back(std::move(f));
  }

  if (j.contains("p_indirect")) {
    const auto& p = j["p_indirect"];
    auto set = [](VehicleSource& src, const Json& v) {
      if (!v.is_number()) throw Error(ErrorCode::ConfigError, "p_indirect overrides must be numbers");
      if (src.bicycle) src.spec.p_indirect = v.get<double>();
    };
    if (p.is_number()) {
      for (auto& [name, src] : sc.vtypes) set(src, p);
    } else if (p.is_object()) {
      for (const auto& [name, v] : p.items()) {
        const auto it = sc.vtypes.find(name);
        if (it == sc.vtypes.end()) throw Error(ErrorCode::ConfigError, "p_indirect override for unknown vtype " + name);
        set(it->second, v);
      }
    } else {
      throw Error(ErrorCode::ConfigError, "p_indirect must be a number or an object");
    }
  }
  sc.validate();
  return sc;
}

ScenarioConfig corridor_scenario(const CorridorOptions& options, const SimulationConfig& sim,
                                 const ClassModels* models) {
  ScenarioConfig sc;
  sc.network = building([&] { return build_straight_corridor(options.length, options.speed_limit); });
  sc.sim = sim;
  sc.vtypes[options.vtype] = resolve_vtype(options.vtype, models);
  sc.flows.push_back({"bike", options.vtype, "corridor", {}, {}, options.bicycle_rate, options.bicycle_count, 0.0, -1.0});
  if (options.car_rate > 0.0) {
    sc.vtypes["car"] = car_source();
    sc.flows.push_back({"car", "car", "corridor", {}, {}, options.car_rate, 0, 0.0, -1.0});
  }
  sc.validate();
  return sc;
}

ScenarioConfig fourway_scenario(const FourWayOptions& options, const SimulationConfig& sim,
                                const ClassModels* models) {
  ScenarioConfig sc;
  sc.network = building([&] { return build_four_way_intersection(options.network); });
  sc.sim = sim;
  auto bikes = resolve_vtype(options.vtype, models);
  if (options.p_indirect) bikes.spec.p_indirect = *options.p_indirect;
  sc.vtypes[options.vtype] = bikes;
  if (options.car_rate > 0.0) sc.vtypes["car"] = car_source();
  for (const char* arm : {"N", "E", "S", "W"}) {
    const std::string from = std::string("in_") + arm;
    sc.flows.push_back({std::string("bike_") + arm, options.vtype, from, options.bicycle_turns, {},
                        options.bicycle_rate, options.bicycle_count, 0.0, -1.0});
    if (options.car_rate > 0.0)
      sc.flows.push_back({std::string("car_") + arm, "car", from,
                          {{Movement::Straight, 0.7}, {Movement::Left, 0.15}, {Movement::Right, 0.15}}, {},
                          options.car_rate, 0, 0.0, -1.0});
  }
  sc.validate();
  return sc;
}

}  // namespace cycleflow
