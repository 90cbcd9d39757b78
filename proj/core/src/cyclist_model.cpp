#include "cycleflow/cyclist_model.hpp"

#include <algorithm>
#include <array>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <sstream>

#include "cycleflow/error.hpp"
#include "cycleflow/parallel.hpp"
#include "cycleflow/rng.hpp"
#include "cycleflow/stats.hpp"
#include "text_util.hpp"

namespace cycleflow {
namespace {

constexpr std::size_t kMaxTruncationAttempts = 1000;
constexpr std::array<Quantity, 3> kQuantities = {Quantity::Accel, Quantity::Decel, Quantity::VMax};

double draw(const ParamSource& source, const Bounds& bounds, Rng& rng, Quantity q) {
  if (const auto* scalar = std::get_if<double>(&source)) {
    if (!bounds.contains(*scalar))
      throw Error(ErrorCode::TruncationExhausted, to_string(q) + " scalar outside its bounds");
    return *scalar;
  }
  const auto& fit = std::get<FittedDist>(source);
  for (std::size_t i = 0; i < kMaxTruncationAttempts; ++i) {
    const double x = sample(fit.family, fit.params, rng);
    if (bounds.contains(x)) return x;
  }
  throw Error(ErrorCode::TruncationExhausted,
              to_string(q) + ": no draw inside bounds after " + std::to_string(kMaxTruncationAttempts) +
                  " attempts");
}

void validate_bounds(const Bounds& b, Quantity q) {
  if (!(b.lo >= 0.0 && b.hi > b.lo && std::isfinite(b.hi)))
    throw Error(ErrorCode::ConfigError, to_string(q) + " bounds must satisfy 0 <= lo < hi");
}

void validate_source(const ParamSource& s, Quantity q) {
  if (const auto* scalar = std::get_if<double>(&s)) {
    if (!(*scalar > 0.0) || !std::isfinite(*scalar))
      throw Error(ErrorCode::ConfigError, to_string(q) + " scalar must be positive");
    return;
  }
  const auto& fit = std::get<FittedDist>(s);
  if (!fit.converged) throw Error(ErrorCode::ConfigError, to_string(q) + " references a failed fit");
  try {
    validate(fit.family, fit.params);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, to_string(q) + ": " + e.what());
  }
}

}  // namespace

std::string to_string(CyclistClass c) {
  switch (c) {
    case CyclistClass::Slow: return "slow";
    case CyclistClass::Medium: return "medium";
    case CyclistClass::Fast: return "fast";
    case CyclistClass::All: return "all";
  }
  return "all";
}

CyclistClass cyclist_class_from_string(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto c : kAllClasses)
    if (to_string(c) == lower) return c;
  throw Error(ErrorCode::ConfigError, "unknown cyclist class '" + s + "'");
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::Accel: return "accel";
    case Quantity::Decel: return "decel";
    case Quantity::VMax: return "vmax";
  }
  return "accel";
}

ClassThresholds derive_thresholds(std::span<const double> avg_velocities) {
  if (avg_velocities.size() < 4)
    throw Error(ErrorCode::TooFewRides, "need at least 4 rides, got " + std::to_string(avg_velocities.size()));
  std::vector<double> sorted(avg_velocities.begin(), avg_velocities.end());
  std::sort(sorted.begin(), sorted.end());
  const ClassThresholds t{quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.75)};
  if (!(t.slow_max < t.fast_min))
    throw Error(ErrorCode::DegenerateSplit, "25th and 75th percentile coincide");
  return t;
}

CyclistClass classify_ride(double avg_velocity, const ClassThresholds& thresholds) {
  if (avg_velocity <= thresholds.slow_max) return CyclistClass::Slow;
  if (avg_velocity <= thresholds.fast_min) return CyclistClass::Medium;
  return CyclistClass::Fast;
}

const ParamSource& VTypeDistributionSpec::source(Quantity q) const {
  switch (q) {
    case Quantity::Accel: return accel;
    case Quantity::Decel: return decel;
    case Quantity::VMax: return vmax;
  }
  return accel;
}

const Bounds& VTypeDistributionSpec::bounds(Quantity q) const {
  switch (q) {
    case Quantity::Accel: return accel_bounds;
    case Quantity::Decel: return decel_bounds;
    case Quantity::VMax: return vmax_bounds;
  }
  return accel_bounds;
}

void VTypeDistributionSpec::validate() const {
  for (const auto q : kQuantities) {
    validate_bounds(bounds(q), q);
    validate_source(source(q), q);
  }
  if (!(p_indirect >= 0.0 && p_indirect <= 1.0))
    throw Error(ErrorCode::ConfigError, "p_indirect must lie in [0, 1]");
  if (!(min_gap >= 0.0)) throw Error(ErrorCode::ConfigError, "min_gap must be non-negative");
  if (!(length > 0.0)) throw Error(ErrorCode::ConfigError, "length must be positive");
}

VTypeDistributionSpec sumo_default_spec() {
  VTypeDistributionSpec spec;
  spec.accel = 1.2;
  spec.decel = 3.0;
  spec.vmax = 5.56;
  spec.p_indirect = 0.0;
  return spec;
}

const std::vector<DistFamily>& ModelConfig::families(Quantity q) const {
  switch (q) {
    case Quantity::Accel: return accel_families;
    case Quantity::Decel: return decel_families;
    case Quantity::VMax: return vmax_families;
  }
  return accel_families;
}

const std::vector<double>& ClassSamples::values(Quantity q) const {
  switch (q) {
    case Quantity::Accel: return accel;
    case Quantity::Decel: return decel;
    case Quantity::VMax: return vmax;
  }
  return accel;
}

const std::vector<FittedDist>& QuantityFits::get(Quantity q) const {
  switch (q) {
    case Quantity::Accel: return accel;
    case Quantity::Decel: return decel;
    case Quantity::VMax: return vmax;
  }
  return accel;
}

std::vector<FittedDist>& QuantityFits::get(Quantity q) {
  return const_cast<std::vector<FittedDist>&>(std::as_const(*this).get(q));
}

std::map<CyclistClass, ClassSamples> pool_by_class(std::span<const RideKinematics> kinematics,
                                                   const ClassThresholds& thresholds) {
  std::map<CyclistClass, ClassSamples> pools;
  for (const auto c : kAllClasses) pools[c];
  for (const auto& ride : kinematics) {
    for (const auto c : {CyclistClass::All, classify_ride(ride.avg_moving_velocity, thresholds)}) {
      auto& pool = pools[c];
      ++pool.rides;
      pool.vmax.push_back(ride.v_max);
      for (const auto& m : ride.maneuvers)
        (m.kind == ManeuverKind::Acceleration ? pool.accel : pool.decel).push_back(m.peak_rate);
    }
  }
  return pools;
}

QuantityFits fit_class(const ClassSamples& samples, const ModelConfig& config) {
  QuantityFits fits;
  for (const auto q : kQuantities) {
    const auto& families = config.families(q);
    fits.get(q) = select_best_fit(samples.values(q), families, config.fit);
  }
  return fits;
}

VTypeDistributionSpec make_spec(CyclistClass cls, const QuantityFits& fits, const ModelConfig& config) {
  VTypeDistributionSpec spec;
  spec.cyclist_class = cls;
  spec.accel_bounds = config.accel_bounds;
  spec.decel_bounds = config.decel_bounds;
  spec.vmax_bounds = config.vmax_bounds;
  spec.min_gap = config.min_gap;
  spec.length = config.length;
  const auto p = config.p_indirect.find(cls);
  spec.p_indirect = p != config.p_indirect.end() ? p->second : 0.0;
  std::array<ParamSource*, 3> slots = {&spec.accel, &spec.decel, &spec.vmax};
  for (std::size_t i = 0; i < kQuantities.size(); ++i) {
    const auto& ranked = fits.get(kQuantities[i]);
    if (ranked.empty() || !ranked.front().converged)
      throw Error(ErrorCode::DegenerateData, to_string(cls) + " " + to_string(kQuantities[i]) +
                                                 ": no candidate family could be fitted" +
                                                 (ranked.empty() ? "" : " (" + ranked.front().failure + ")"));
    *slots[i] = ranked.front();
  }
  return spec;
}

ClassModels build_class_models(std::span<const RideKinematics> kinematics, const ClassThresholds& thresholds,
                               const ModelConfig& config) {
  const auto pools = pool_by_class(kinematics, thresholds);
  for (const auto& [cls, pool] : pools)
    if (pool.rides == 0) throw Error(ErrorCode::EmptyClass, "class " + to_string(cls) + " has no rides");

  // One task per (class, quantity); slots are fixed so output is independent
  // of the worker count.
  constexpr std::size_t kTasks = kAllClasses.size() * kQuantities.size();
  std::array<std::vector<FittedDist>, kTasks> results;
  parallel_for(kTasks, config.jobs, [&](std::size_t i) {
    const auto cls = kAllClasses[i / kQuantities.size()];
    const auto q = kQuantities[i % kQuantities.size()];
    results[i] = select_best_fit(pools.at(cls).values(q), config.families(q), config.fit);
  });

  ClassModels models;
  models.thresholds = thresholds;
  for (std::size_t c = 0; c < kAllClasses.size(); ++c) {
    auto& fits = models.fits[kAllClasses[c]];
    for (std::size_t k = 0; k < kQuantities.size(); ++k)
      fits.get(kQuantities[k]) = std::move(results[c * kQuantities.size() + k]);
    models.specs[kAllClasses[c]] = make_spec(kAllClasses[c], fits, config);
  }
  return models;
}

VTypeParams sample_vtype(const VTypeDistributionSpec& spec, Rng& rng) {
  VTypeParams p;
  p.a_max = draw(spec.accel, spec.accel_bounds, rng, Quantity::Accel);
  p.d_max = draw(spec.decel, spec.decel_bounds, rng, Quantity::Decel);
  p.v_max = draw(spec.vmax, spec.vmax_bounds, rng, Quantity::VMax);
  p.p_indirect = spec.p_indirect;
  p.min_gap = spec.min_gap;
  p.length = spec.length;
  return p;
}

std::string export_sumo_vtypes(const VTypeDistributionSpec& spec, std::size_t n, std::uint64_t seed,
                               const std::string& distribution_id) {
  if (n == 0) throw Error(ErrorCode::ConfigError, "vType count must be at least 1");
  const std::string id = distribution_id.empty() ? "bicycle_" + to_string(spec.cyclist_class) : distribution_id;
  Rng rng(seed);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<additional>\n";
  out << "    <vTypeDistribution id=\"" << id << "\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = sample_vtype(spec, rng);
    out << "        <vType id=\"" << id << "_" << i << "\" vClass=\"bicycle\""
        << " accel=\"" << detail::fixed(p.a_max, 4) << "\""
        << " decel=\"" << detail::fixed(p.d_max, 4) << "\""
        << " maxSpeed=\"" << detail::fixed(p.v_max, 4) << "\""
        << " minGap=\"" << detail::fixed(p.min_gap, 4) << "\""
        << " length=\"" << detail::fixed(p.length, 4) << "\"/>\n";
  }
  out << "    </vTypeDistribution>\n";
  out << "</additional>\n";
  return out.str();
}

std::vector<ParsedVType> parse_sumo_vtypes(const std::string& xml) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedFile, std::string("invalid XML: ") + e.what());
  }

  auto number = [](const pt::ptree& attrs, const char* key) {
    const auto v = attrs.get_optional<std::string>(key);
    if (!v) throw Error(ErrorCode::MalformedFile, std::string("vType lacks attribute ") + key);
    const auto d = detail::parse_double(*v);
    if (!d) throw Error(ErrorCode::MalformedFile, std::string("bad number in attribute ") + key);
    return *d;
  };

  std::vector<ParsedVType> out;
  auto visit = [&](auto&& self, const pt::ptree& node) -> void {
    for (const auto& [name, child] : node) {
      if (name != "vTypeDistribution") {
        if (name != "<xmlattr>") self(self, child);
        continue;
      }
      for (const auto& [cname, vtype] : child) {
        if (cname != "vType") continue;
        const pt::ptree empty;
        const pt::ptree& attrs = vtype.get_child("<xmlattr>", empty);
        ParsedVType v;
        v.id = attrs.get<std::string>("id", "");
        v.vclass = attrs.get<std::string>("vClass", "");
        v.params.a_max = number(attrs, "accel");
        v.params.d_max = number(attrs, "decel");
        v.params.v_max = number(attrs, "maxSpeed");
        v.params.min_gap = number(attrs, "minGap");
        v.params.length = number(attrs, "length");
        out.push_back(std::move(v));
      }
    }
  };
  visit(visit, tree);
  return out;
}

}  // namespace cycleflow
