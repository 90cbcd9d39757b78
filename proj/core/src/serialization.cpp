#include "cycleflow/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cycleflow/error.hpp"
#include "cycleflow/stats.hpp"
#include "text_util.hpp"

namespace cycleflow {
namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::ConfigError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
void maybe(const Json& j, const char* key, T& out) {
  if (j.is_object() && j.contains(key)) out = get<T>(j, key);
}

Json bounds_to_json(const Bounds& b) { return Json::array({b.lo, b.hi}); }

Bounds bounds_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::ConfigError, "bounds must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json source_to_json(const ParamSource& s) {
  if (const auto* x = std::get_if<double>(&s)) return Json{{"scalar", *x}};
  return fitted_dist_to_json(std::get<FittedDist>(s));
}

ParamSource source_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("scalar")) return get<double>(j, "scalar");
  return fitted_dist_from_json(j);
}

std::vector<DistFamily> families_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "families must be a list");
  std::vector<DistFamily> out;
  for (const auto& f : j) {
    if (!f.is_string()) throw Error(ErrorCode::ConfigError, "family names must be strings");
    try {
      out.push_back(family_from_string(f.get<std::string>()));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "families must not be empty");
  return out;
}

Json families_to_json(const std::vector<FittedDist>& fits) {
  Json arr = Json::array();
  for (const auto& f : fits) arr.push_back(fitted_dist_to_json(f));
  return arr;
}

std::vector<FittedDist> fit_list_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "fit list must be an array");
  std::vector<FittedDist> out;
  for (const auto& f : j) out.push_back(fitted_dist_from_json(f));
  return out;
}

std::string num(double v) { return detail::format_double(v); }

double parse_num(std::string_view s, std::size_t line) {
  const auto v = detail::parse_double(s);
  if (!v) throw Error(ErrorCode::MalformedFile, "line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return *v;
}

void expect_header(const std::vector<std::string_view>& lines, std::string_view header, const char* what) {
  if (lines.empty() || !detail::trim(lines.front()).starts_with(header))
    throw Error(ErrorCode::MalformedFile, std::string(what) + " must start with header " + std::string(header));
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
  }
}

Json fitted_dist_to_json(const FittedDist& fit) {
  Json j;
  j["family"] = to_string(fit.family);
  j["shape"] = fit.params.shape;
  j["loc"] = fit.params.loc;
  j["scale"] = fit.params.scale;
  j["loglik"] = std::isfinite(fit.loglik) ? Json(fit.loglik) : Json(nullptr);
  j["ks"] = fit.ks_stat;
  j["n"] = fit.n;
  j["converged"] = fit.converged;
  if (!fit.failure.empty()) j["failure"] = fit.failure;
  return j;
}

FittedDist fitted_dist_from_json(const Json& j) {
  FittedDist f;
  try {
    f.family = family_from_string(get<std::string>(j, "family"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
  f.params.shape = get<std::vector<double>>(j, "shape");
  f.params.loc = get<double>(j, "loc");
  f.params.scale = get<double>(j, "scale");
  f.loglik = j.contains("loglik") && j["loglik"].is_number() ? j["loglik"].get<double>()
                                                              : -std::numeric_limits<double>::infinity();
  maybe(j, "ks", f.ks_stat);
  maybe(j, "n", f.n);
  maybe(j, "converged", f.converged);
  maybe(j, "failure", f.failure);
  if (f.converged) {
    try {
      validate(f.family, f.params);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
  return f;
}

Json thresholds_to_json(const ClassThresholds& t) { return Json{{"slow_max", t.slow_max}, {"fast_min", t.fast_min}}; }

ClassThresholds thresholds_from_json(const Json& j) {
  ClassThresholds t{get<double>(j, "slow_max"), get<double>(j, "fast_min")};
  if (!(t.slow_max > 0.0 && t.slow_max < t.fast_min))
    throw Error(ErrorCode::ConfigError, "thresholds must satisfy 0 < slow_max < fast_min");
  return t;
}

Json spec_to_json(const VTypeDistributionSpec& spec) {
  Json j;
  j["class"] = to_string(spec.cyclist_class);
  j["accel"] = source_to_json(spec.accel);
  j["decel"] = source_to_json(spec.decel);
  j["vmax"] = source_to_json(spec.vmax);
  j["p_indirect"] = spec.p_indirect;
  j["bounds"] = Json{{"accel", bounds_to_json(spec.accel_bounds)},
                     {"decel", bounds_to_json(spec.decel_bounds)},
                     {"vmax", bounds_to_json(spec.vmax_bounds)}};
  j["min_gap"] = spec.min_gap;
  j["length"] = spec.length;
  return j;
}

VTypeDistributionSpec spec_from_json(const Json& j, CyclistClass cls) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "vtype spec must be an object");
  VTypeDistributionSpec spec;
  spec.cyclist_class = j.contains("class") ? cyclist_class_from_string(get<std::string>(j, "class")) : cls;
  if (j.contains("accel")) spec.accel = source_from_json(j["accel"]);
  if (j.contains("decel")) spec.decel = source_from_json(j["decel"]);
  if (j.contains("vmax")) spec.vmax = source_from_json(j["vmax"]);
  maybe(j, "p_indirect", spec.p_indirect);
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    if (b.contains("accel")) spec.accel_bounds = bounds_from_json(b["accel"]);
    if (b.contains("decel")) spec.decel_bounds = bounds_from_json(b["decel"]);
    if (b.contains("vmax")) spec.vmax_bounds = bounds_from_json(b["vmax"]);
  }
  maybe(j, "min_gap", spec.min_gap);
  maybe(j, "length", spec.length);
  spec.validate();
  return spec;
}

Json fits_to_json(const std::map<CyclistClass, QuantityFits>& fits) {
  Json classes = Json::object();
  for (const auto& [cls, q] : fits)
    classes[to_string(cls)] = Json{{"accel", families_to_json(q.accel)},
                                   {"decel", families_to_json(q.decel)},
                                   {"vmax", families_to_json(q.vmax)}};
  return Json{{"classes", classes}};
}

std::map<CyclistClass, QuantityFits> fits_from_json(const Json& j) {
  const auto classes = get<Json>(j, "classes");
  if (!classes.is_object()) throw Error(ErrorCode::ConfigError, "'classes' must be an object");
  std::map<CyclistClass, QuantityFits> out;
  for (const auto& [name, q] : classes.items()) {
    auto& fits = out[cyclist_class_from_string(name)];
    if (q.contains("accel")) fits.accel = fit_list_from_json(q["accel"]);
    if (q.contains("decel")) fits.decel = fit_list_from_json(q["decel"]);
    if (q.contains("vmax")) fits.vmax = fit_list_from_json(q["vmax"]);
  }
  return out;
}

Json models_to_json(const ClassModels& models) {
  Json classes = Json::object();
  for (const auto& [cls, spec] : models.specs) classes[to_string(cls)] = spec_to_json(spec);
  Json j;
  j["thresholds"] = thresholds_to_json(models.thresholds);
  j["classes"] = classes;
  if (!models.fits.empty()) j["fits"] = fits_to_json(models.fits)["classes"];
  return j;
}

ClassModels models_from_json(const Json& j) {
  ClassModels m;
  if (j.contains("thresholds")) m.thresholds = thresholds_from_json(j["thresholds"]);
  const auto classes = get<Json>(j, "classes");
  if (!classes.is_object() || classes.empty()) throw Error(ErrorCode::ConfigError, "'classes' must be a non-empty object");
  for (const auto& [name, spec] : classes.items()) {
    const auto cls = cyclist_class_from_string(name);
    m.specs[cls] = spec_from_json(spec, cls);
  }
  if (j.contains("fits")) m.fits = fits_from_json(Json{{"classes", j["fits"]}});
  return m;
}

ModelConfig model_config_from_json(const Json& j, ModelConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "model config must be an object");
  if (j.contains("p_indirect")) {
    const auto& p = j["p_indirect"];
    if (p.is_number()) {
      for (auto& [cls, v] : base.p_indirect) v = p.get<double>();
    } else if (p.is_object()) {
      for (const auto& [name, v] : p.items()) {
        if (!v.is_number()) throw Error(ErrorCode::ConfigError, "p_indirect values must be numbers");
        base.p_indirect[cyclist_class_from_string(name)] = v.get<double>();
      }
    } else {
      throw Error(ErrorCode::ConfigError, "p_indirect must be a number or an object");
    }
    for (const auto& [cls, v] : base.p_indirect)
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::ConfigError, "p_indirect must lie in [0, 1]");
  }
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    if (b.contains("accel")) base.accel_bounds = bounds_from_json(b["accel"]);
    if (b.contains("decel")) base.decel_bounds = bounds_from_json(b["decel"]);
    if (b.contains("vmax")) base.vmax_bounds = bounds_from_json(b["vmax"]);
  }
  maybe(j, "min_gap", base.min_gap);
  maybe(j, "length", base.length);
  if (j.contains("families")) {
    const auto& f = j["families"];
    if (f.contains("accel")) base.accel_families = families_from_json(f["accel"]);
    if (f.contains("decel")) base.decel_families = families_from_json(f["decel"]);
    if (f.contains("vmax")) base.vmax_families = families_from_json(f["vmax"]);
  }
  maybe(j, "restarts", base.fit.restarts);
  maybe(j, "min_samples", base.fit.min_samples);
  maybe(j, "jobs", base.jobs);
  return base;
}

FilterConfig filter_config_from_json(const Json& j, FilterConfig base) {
  maybe(j, "gaussian_sigma", base.gaussian_sigma);
  maybe(j, "gaussian_window", base.gaussian_window);
  maybe(j, "lowpass_alpha", base.lowpass_alpha);
  maybe(j, "stop_threshold", base.stop_threshold);
  base.validate();
  return base;
}

RideFilter ride_filter_from_json(const Json& j, RideFilter base) {
  maybe(j, "accuracy_threshold", base.accuracy_threshold_m);
  maybe(j, "min_samples", base.min_samples);
  maybe(j, "exclude_ebikes", base.exclude_ebikes);
  return base;
}

ManeuverRules maneuver_rules_from_json(const Json& j, ManeuverRules base) {
  maybe(j, "min_distance", base.min_distance);
  maybe(j, "max_distance", base.max_distance);
  maybe(j, "min_duration", base.min_duration);
  maybe(j, "max_duration", base.max_duration);
  maybe(j, "min_velocity_change", base.min_velocity_change);
  maybe(j, "emergency_decel", base.emergency_decel);
  return base;
}

std::string profiles_csv(const std::vector<std::pair<std::string, VelocityProfile>>& profiles) {
  std::string out = "ride_id,t,v\n";
  for (const auto& [id, p] : profiles)
    for (const auto& s : p.samples) out += id + "," + num(s.t) + "," + num(s.v) + "\n";
  return out;
}

std::vector<std::pair<std::string, VelocityProfile>> parse_profiles_csv(const std::string& content) {
  const auto lines = detail::split_lines(content);
  expect_header(lines, "ride_id,t,v", "profile CSV");
  std::vector<std::pair<std::string, VelocityProfile>> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto f = detail::split(lines[i], ',');
    if (f.size() < 3) throw Error(ErrorCode::MalformedFile, "line " + std::to_string(i + 1) + ": expected ride_id,t,v");
    const std::string id(detail::trim(f[0]));
    auto [it, fresh] = index.emplace(id, out.size());
    if (fresh) out.push_back({id, {}});
    auto& prof = out[it->second].second;
    const VelocitySample s{parse_num(f[1], i + 1), parse_num(f[2], i + 1)};
    if (!prof.samples.empty() && !(s.t > prof.samples.back().t))
      throw Error(ErrorCode::MalformedFile, "line " + std::to_string(i + 1) + ": times must increase within a ride");
    prof.samples.push_back(s);
  }
  for (auto& [id, p] : out) {
    std::vector<double> gaps;
    for (std::size_t k = 1; k < p.samples.size(); ++k) gaps.push_back(p.samples[k].t - p.samples[k - 1].t);
    if (!gaps.empty()) p.dt = median(gaps);
  }
  return out;
}

std::string rides_csv(const std::vector<RideKinematics>& rides, const ClassThresholds* thresholds) {
  std::string out = thresholds ? "ride_id,avg_moving_velocity,v_max,class\n" : "ride_id,avg_moving_velocity,v_max\n";
  for (const auto& r : rides) {
    out += r.ride_id + "," + num(r.avg_moving_velocity) + "," + num(r.v_max);
    if (thresholds) out += "," + to_string(classify_ride(r.avg_moving_velocity, *thresholds));
    out += "\n";
  }
  return out;
}

std::string maneuvers_csv(const std::vector<RideKinematics>& rides) {
  std::string out = "ride_id,kind,start_idx,end_idx,v_start,v_end,duration_s,distance_m,peak_rate_ms2\n";
  for (const auto& r : rides)
    for (const auto& m : r.maneuvers)
      out += r.ride_id + "," + to_string(m.kind) + "," + std::to_string(m.start_idx) + "," +
             std::to_string(m.end_idx) + "," + num(m.v_start) + "," + num(m.v_end) + "," + num(m.duration) + "," +
             num(m.distance) + "," + num(m.peak_rate) + "\n";
  return out;
}

std::vector<RideKinematics> parse_kinematics_csv(const std::string& rides, const std::string& maneuvers) {
  std::vector<RideKinematics> out;
  std::map<std::string, std::size_t> index;
  const auto rl = detail::split_lines(rides);
  expect_header(rl, "ride_id,avg_moving_velocity,v_max", "rides CSV");
  for (std::size_t i = 1; i < rl.size(); ++i) {
    if (detail::trim(rl[i]).empty()) continue;
    const auto f = detail::split(rl[i], ',');
    if (f.size() < 3) throw Error(ErrorCode::MalformedFile, "rides line " + std::to_string(i + 1) + ": too few fields");
    RideKinematics k;
    k.ride_id = std::string(detail::trim(f[0]));
    k.avg_moving_velocity = parse_num(f[1], i + 1);
    k.v_max = parse_num(f[2], i + 1);
    if (!index.emplace(k.ride_id, out.size()).second)
      throw Error(ErrorCode::MalformedFile, "duplicate ride id " + k.ride_id);
    out.push_back(std::move(k));
  }
  const auto ml = detail::split_lines(maneuvers);
  expect_header(ml, "ride_id,kind", "maneuvers CSV");
  for (std::size_t i = 1; i < ml.size(); ++i) {
    if (detail::trim(ml[i]).empty()) continue;
    const auto f = detail::split(ml[i], ',');
    if (f.size() < 9)
      throw Error(ErrorCode::MalformedFile, "maneuvers line " + std::to_string(i + 1) + ": too few fields");
    const auto it = index.find(std::string(detail::trim(f[0])));
    if (it == index.end())
      throw Error(ErrorCode::MalformedFile, "maneuver for unknown ride " + std::string(detail::trim(f[0])));
    Maneuver m;
    try {
      m.kind = maneuver_kind_from_string(std::string(detail::trim(f[1])));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedFile, e.what());
    }
    m.start_idx = static_cast<std::size_t>(parse_num(f[2], i + 1));
    m.end_idx = static_cast<std::size_t>(parse_num(f[3], i + 1));
    m.v_start = parse_num(f[4], i + 1);
    m.v_end = parse_num(f[5], i + 1);
    m.duration = parse_num(f[6], i + 1);
    m.distance = parse_num(f[7], i + 1);
    m.peak_rate = parse_num(f[8], i + 1);
    out[it->second].maneuvers.push_back(m);
  }
  return out;
}

}  // namespace cycleflow
