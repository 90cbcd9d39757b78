#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cycleflow/preprocess.hpp"

namespace cycleflow {

enum class ManeuverKind { Acceleration, Deceleration };

std::string to_string(ManeuverKind kind);
ManeuverKind maneuver_kind_from_string(const std::string& s);

struct Maneuver {
  ManeuverKind kind = ManeuverKind::Acceleration;
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  double v_start = 0.0;
  double v_end = 0.0;
  double duration = 0.0;   // s
  double distance = 0.0;   // m
  double peak_rate = 0.0;  // m/s^2, positive for both kinds
};

/// Segment filter limits. Bounds are inclusive; the relative velocity change
/// must be strictly greater than `min_velocity_change`.
struct ManeuverRules {
  double min_distance = 20.0;
  double max_distance = 350.0;
  double min_duration = 5.0;
  double max_duration = 40.0;
  double min_velocity_change = 0.5;
  double emergency_decel = 7.0;
};

struct RideKinematics {
  std::string ride_id;
  double avg_moving_velocity = 0.0;
  double v_max = 0.0;
  std::vector<Maneuver> maneuvers;
};

using Segment = std::pair<std::size_t, std::size_t>;

/// Cuts at strict local extrema. A flat run at an extremum counts once, at
/// the run's last index. The segments tile [0, n-1] and each is monotone.
std::vector<Segment> segment_at_extrema(const VelocityProfile& profile);

/// Segment statistics without filtering. Distance integrates the profile with
/// the trapezoid rule; duration is the time span of the segment.
Maneuver describe_segment(const VelocityProfile& profile, Segment segment);

bool passes_rules(const Maneuver& m, const ManeuverRules& rules = {});

std::vector<Maneuver> filter_segments(const VelocityProfile& profile,
                                      const std::vector<Segment>& segments,
                                      const ManeuverRules& rules = {});

/// Moving average, maximum speed, and maneuvers of one ride. Decelerations
/// harder than the emergency limit are dropped.
RideKinematics extract_kinematics(const VelocityProfile& profile, double stop_threshold,
                                  const ManeuverRules& rules = {});

}  // namespace cycleflow
