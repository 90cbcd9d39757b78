#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "cycleflow/cyclist_model.hpp"
#include "cycleflow/maneuver.hpp"
#include "cycleflow/preprocess.hpp"
#include "cycleflow/ride.hpp"

namespace cycleflow {

using Json = nlohmann::json;

/// Throws Error{IoError}.
std::string read_file(const std::filesystem::path& path);
/// Creates parent directories. Throws Error{IoError}.
void write_file(const std::filesystem::path& path, const std::string& content);
/// Throws Error{IoError | MalformedFile}.
Json read_json_file(const std::filesystem::path& path);

// JSON readers throw Error{ConfigError} on missing or mistyped fields.

/// {family, shape[], loc, scale, loglik, ks, n, converged[, failure]}.
Json fitted_dist_to_json(const FittedDist& fit);
FittedDist fitted_dist_from_json(const Json& j);

Json thresholds_to_json(const ClassThresholds& t);
ClassThresholds thresholds_from_json(const Json& j);

/// Scalar sources are written as {"scalar": x}.
Json spec_to_json(const VTypeDistributionSpec& spec);
VTypeDistributionSpec spec_from_json(const Json& j, CyclistClass cls = CyclistClass::All);

/// {classes: {cls: {accel: [...], decel: [...], vmax: [...]}}}, ranked.
Json fits_to_json(const std::map<CyclistClass, QuantityFits>& fits);
std::map<CyclistClass, QuantityFits> fits_from_json(const Json& j);

/// {thresholds, classes: {cls: spec}, fits}.
Json models_to_json(const ClassModels& models);
ClassModels models_from_json(const Json& j);

/// Applies the keys present in `j` on top of `base`: p_indirect (per class),
/// bounds, min_gap, length, families, restarts, jobs.
ModelConfig model_config_from_json(const Json& j, ModelConfig base = {});
FilterConfig filter_config_from_json(const Json& j, FilterConfig base = {});
RideFilter ride_filter_from_json(const Json& j, RideFilter base = {});
ManeuverRules maneuver_rules_from_json(const Json& j, ManeuverRules base = {});

/// `ride_id,t,v`, one row per profile sample.
std::string profiles_csv(const std::vector<std::pair<std::string, VelocityProfile>>& profiles);
/// Ride order follows first appearance. Throws Error{MalformedFile}.
std::vector<std::pair<std::string, VelocityProfile>> parse_profiles_csv(const std::string& content);

/// `ride_id,avg_moving_velocity,v_max[,class]`.
std::string rides_csv(const std::vector<RideKinematics>& rides, const ClassThresholds* thresholds = nullptr);
/// `ride_id,kind,start_idx,end_idx,v_start,v_end,duration_s,distance_m,peak_rate_ms2`.
std::string maneuvers_csv(const std::vector<RideKinematics>& rides);
/// Joins the two tables on ride_id. Throws Error{MalformedFile}.
std::vector<RideKinematics> parse_kinematics_csv(const std::string& rides, const std::string& maneuvers);

}  // namespace cycleflow
