#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cycleflow/fitting.hpp"
#include "cycleflow/maneuver.hpp"

namespace cycleflow {

enum class CyclistClass { Slow, Medium, Fast, All };

inline constexpr std::array<CyclistClass, 4> kAllClasses = {CyclistClass::All, CyclistClass::Slow,
                                                            CyclistClass::Medium, CyclistClass::Fast};

std::string to_string(CyclistClass c);
/// Throws Error{ConfigError}.
CyclistClass cyclist_class_from_string(const std::string& s);

struct ClassThresholds {
  double slow_max = 0.0;  // m/s, inclusive upper bound of Slow
  double fast_min = 0.0;  // m/s, exclusive lower bound of Fast

  /// 13.5 km/h and 17.9 km/h.
  static ClassThresholds published() { return {13.5 / 3.6, 17.9 / 3.6}; }
};

/// 25th and 75th percentile of the per-ride average moving velocities, using
/// linear interpolation between order statistics (h = p (n - 1)).
/// Throws Error{TooFewRides} for n < 4 and Error{DegenerateSplit} when the
/// two quantiles coincide.
ClassThresholds derive_thresholds(std::span<const double> avg_velocities);

/// Slow: v <= slow_max. Medium: slow_max < v <= fast_min. Fast: v > fast_min.
CyclistClass classify_ride(double avg_velocity, const ClassThresholds& thresholds);

struct VTypeParams {
  double a_max = 0.0;  // m/s^2
  double d_max = 0.0;  // m/s^2, positive magnitude
  double v_max = 0.0;  // m/s
  double p_indirect = 0.0;
  double min_gap = 0.5;  // m
  double length = 1.6;   // m
};

/// Truncation interval (lo, hi].
struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x <= hi; }
};

using ParamSource = std::variant<double, FittedDist>;

enum class Quantity { Accel, Decel, VMax };
std::string to_string(Quantity q);

struct VTypeDistributionSpec {
  CyclistClass cyclist_class = CyclistClass::All;
  ParamSource accel = 1.2;
  ParamSource decel = 3.0;
  ParamSource vmax = 5.56;
  double p_indirect = 0.0;
  Bounds accel_bounds{0.0, 3.0};
  Bounds decel_bounds{0.0, 7.0};
  Bounds vmax_bounds{0.0, 15.0};
  double min_gap = 0.5;
  double length = 1.6;

  const ParamSource& source(Quantity q) const;
  const Bounds& bounds(Quantity q) const;

  /// Throws Error{ConfigError}.
  void validate() const;
};

/// Scalar stock bicycle: 1.2 m/s^2, 3 m/s^2, 5.56 m/s, direct turns only.
VTypeDistributionSpec sumo_default_spec();

struct ModelConfig {
  std::map<CyclistClass, double> p_indirect = {{CyclistClass::All, 0.61},
                                               {CyclistClass::Slow, 0.95},
                                               {CyclistClass::Medium, 0.87},
                                               {CyclistClass::Fast, 0.50}};
  Bounds accel_bounds{0.0, 3.0};
  Bounds decel_bounds{0.0, 7.0};
  Bounds vmax_bounds{0.0, 15.0};
  double min_gap = 0.5;
  double length = 1.6;
  std::vector<DistFamily> accel_families = {DistFamily::BurrXII, DistFamily::BurrIII,
                                            DistFamily::MielkeBetaKappa};
  std::vector<DistFamily> decel_families = {DistFamily::JohnsonSU, DistFamily::StudentT};
  std::vector<DistFamily> vmax_families = {DistFamily::SymGenNormal, DistFamily::JohnsonSU,
                                           DistFamily::ExpModGaussian, DistFamily::NonCentralT};
  FitOptions fit;
  std::size_t jobs = 1;

  const std::vector<DistFamily>& families(Quantity q) const;
};

/// Peak rates and speeds pooled per class; All pools every ride.
struct ClassSamples {
  std::size_t rides = 0;
  std::vector<double> accel;  // peak rate of acceleration maneuvers
  std::vector<double> decel;  // peak rate of deceleration maneuvers (magnitude)
  std::vector<double> vmax;   // per-ride maximum speed

  const std::vector<double>& values(Quantity q) const;
};

std::map<CyclistClass, ClassSamples> pool_by_class(std::span<const RideKinematics> kinematics,
                                                   const ClassThresholds& thresholds);

struct QuantityFits {
  std::vector<FittedDist> accel, decel, vmax;
  const std::vector<FittedDist>& get(Quantity q) const;
  std::vector<FittedDist>& get(Quantity q);
};

struct ClassModels {
  ClassThresholds thresholds;
  std::map<CyclistClass, VTypeDistributionSpec> specs;
  std::map<CyclistClass, QuantityFits> fits;
};

/// Ranked fits of one class's pooled samples.
QuantityFits fit_class(const ClassSamples& samples, const ModelConfig& config);

/// Fits every class (and All) and keeps the best family per quantity.
/// Fits run in parallel over (class, quantity) with `config.jobs` workers.
/// Throws Error{EmptyClass} if a class has no rides and Error{DegenerateData}
/// if every candidate family failed for one of its quantities.
ClassModels build_class_models(std::span<const RideKinematics> kinematics, const ClassThresholds& thresholds,
                               const ModelConfig& config = {});

/// Spec from the best fits of one class. Throws Error{DegenerateData}.
VTypeDistributionSpec make_spec(CyclistClass cls, const QuantityFits& fits, const ModelConfig& config);

/// Independent draws per quantity, redrawn until inside the truncation
/// bounds. Throws Error{TruncationExhausted} after 1000 attempts.
VTypeParams sample_vtype(const VTypeDistributionSpec& spec, Rng& rng);

/// vTypeDistribution document with `n` sampled vType children.
std::string export_sumo_vtypes(const VTypeDistributionSpec& spec, std::size_t n, std::uint64_t seed,
                               const std::string& distribution_id = {});

struct ParsedVType {
  std::string id;
  std::string vclass;
  VTypeParams params;
};

/// Parses the vType children of every vTypeDistribution. Throws
/// Error{MalformedFile}.
std::vector<ParsedVType> parse_sumo_vtypes(const std::string& xml);

}  // namespace cycleflow
