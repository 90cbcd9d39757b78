#include "cycleflow/maneuver.hpp"

#include <algorithm>
#include <cmath>

#include "cycleflow/error.hpp"

namespace cycleflow {

std::string to_string(ManeuverKind kind) {
  return kind == ManeuverKind::Acceleration ? "acceleration" : "deceleration";
}

ManeuverKind maneuver_kind_from_string(const std::string& s) {
  if (s == "acceleration") return ManeuverKind::Acceleration;
  if (s == "deceleration") return ManeuverKind::Deceleration;
  throw Error(ErrorCode::MalformedFile, "unknown maneuver kind '" + s + "'");
}

std::vector<Segment> segment_at_extrema(const VelocityProfile& profile) {
  const auto& s = profile.samples;
  if (s.empty()) return {};
  if (s.size() == 1) return {{0, 0}};
  std::vector<std::size_t> cuts{0};
  int last_dir = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double dv = s[i + 1].v - s[i].v;
    const int dir = (dv > 0.0) - (dv < 0.0);
    if (dir == 0) continue;
    // v[i] differs from v[i+1], so i closes any plateau preceding the turn.
    if (last_dir != 0 && dir != last_dir) cuts.push_back(i);
    last_dir = dir;
  }
  cuts.push_back(s.size() - 1);
  std::vector<Segment> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) out.emplace_back(cuts[k], cuts[k + 1]);
  return out;
}

Maneuver describe_segment(const VelocityProfile& profile, Segment segment) {
  const auto& s = profile.samples;
  const auto [a, b] = segment;
  Maneuver m;
  m.start_idx = a;
  m.end_idx = b;
  m.v_start = s[a].v;
  m.v_end = s[b].v;
  m.kind = m.v_end > m.v_start ? ManeuverKind::Acceleration : ManeuverKind::Deceleration;
  m.duration = s[b].t - s[a].t;
  for (std::size_t i = a; i < b; ++i) {
    const double dt = s[i + 1].t - s[i].t;
    m.distance += 0.5 * (s[i].v + s[i + 1].v) * dt;
    m.peak_rate = std::max(m.peak_rate, std::abs(s[i + 1].v - s[i].v) / dt);
  }
  return m;
}

bool passes_rules(const Maneuver& m, const ManeuverRules& rules) {
  const double vmax = std::max(m.v_start, m.v_end);
  if (!(vmax > 0.0)) return false;
  const double change = std::abs(m.v_start - m.v_end) / vmax;
  return m.end_idx > m.start_idx && m.distance >= rules.min_distance &&
         m.distance <= rules.max_distance && m.duration >= rules.min_duration &&
         m.duration <= rules.max_duration && change > rules.min_velocity_change;
}

std::vector<Maneuver> filter_segments(const VelocityProfile& profile,
                                      const std::vector<Segment>& segments,
                                      const ManeuverRules& rules) {
  std::vector<Maneuver> out;
  for (const auto& seg : segments) {
    if (seg.second <= seg.first) continue;
    auto m = describe_segment(profile, seg);
    if (passes_rules(m, rules)) out.push_back(m);
  }
  return out;
}

RideKinematics extract_kinematics(const VelocityProfile& profile, double stop_threshold,
                                  const ManeuverRules& rules) {
  if (profile.empty()) throw Error(ErrorCode::EmptyInput, "empty velocity profile");
  RideKinematics k;
  const auto moving = remove_stops(profile, stop_threshold);
  double sum = 0.0;
  for (const auto& s : moving.samples) sum += s.v;
  k.avg_moving_velocity = sum / static_cast<double>(moving.size());
  for (const auto& s : profile.samples) k.v_max = std::max(k.v_max, s.v);
  for (auto& m : filter_segments(profile, segment_at_extrema(profile), rules)) {
    if (m.kind == ManeuverKind::Deceleration && m.peak_rate > rules.emergency_decel) continue;
    k.maneuvers.push_back(m);
  }
  return k;
}

}  // namespace cycleflow
