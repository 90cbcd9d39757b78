#include "cycleflow/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "cycleflow/error.hpp"
#include "cycleflow/geo.hpp"

namespace cycleflow {

void FilterConfig::validate() const {
  if (gaussian_window < 1 || gaussian_window % 2 == 0)
    throw Error(ErrorCode::InvalidConfig, "gaussian_window must be odd and >= 1");
  if (!(gaussian_sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "gaussian_sigma must be > 0");
  if (!(lowpass_alpha > 0.0 && lowpass_alpha <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "lowpass_alpha must be in (0, 1]");
  if (!(stop_threshold >= 0.0)) throw Error(ErrorCode::InvalidConfig, "stop_threshold must be >= 0");
}

std::vector<double> gaussian_kernel(double sigma, std::size_t window) {
  if (window < 1 || window % 2 == 0)
    throw Error(ErrorCode::InvalidConfig, "gaussian window must be odd and >= 1");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidConfig, "gaussian sigma must be > 0");
  const auto half = static_cast<long>(window / 2);
  std::vector<double> w;
  double sum = 0.0;
  for (long k = -half; k <= half; ++k) {
    const double x = static_cast<double>(k);
    w.push_back(std::exp(-x * x / (2.0 * sigma * sigma)));
    sum += w.back();
  }
  for (auto& x : w) x /= sum;
  return w;
}

Ride gaussian_smooth_positions(const Ride& ride, double sigma, std::size_t window) {
  const auto kernel = gaussian_kernel(sigma, window);
  if (ride.samples.empty()) throw Error(ErrorCode::InvalidConfig, "cannot smooth an empty ride");
  Ride out = ride;
  const auto n = static_cast<long>(ride.samples.size());
  const auto half = static_cast<long>(window / 2);
  for (long i = 0; i < n; ++i) {
    double lat = 0.0, lon = 0.0, wsum = 0.0;
    for (long k = -half; k <= half; ++k) {
      const long j = i + k;
      if (j < 0 || j >= n) continue;
      const double w = kernel[static_cast<std::size_t>(k + half)];
      lat += w * ride.samples[static_cast<std::size_t>(j)].lat;
      lon += w * ride.samples[static_cast<std::size_t>(j)].lon;
      wsum += w;
    }
    out.samples[static_cast<std::size_t>(i)].lat = lat / wsum;
    out.samples[static_cast<std::size_t>(i)].lon = lon / wsum;
  }
  return out;
}

VelocityProfile compute_velocity_profile(const Ride& ride) {
  if (ride.samples.size() < 2) throw Error(ErrorCode::TooShort, "need at least two fixes");
  VelocityProfile profile;
  const auto t0 = ride.samples.front().timestamp_ms;
  std::vector<double> spacing;
  for (std::size_t i = 0; i + 1 < ride.samples.size(); ++i) {
    const auto& a = ride.samples[i];
    const auto& b = ride.samples[i + 1];
    const double dt = static_cast<double>(b.timestamp_ms - a.timestamp_ms) / 1000.0;
    const double d = geo::haversine_m({a.lat, a.lon}, {b.lat, b.lon});
    profile.samples.push_back({static_cast<double>(a.timestamp_ms - t0) / 1000.0, d / dt});
    spacing.push_back(dt);
  }
  std::nth_element(spacing.begin(), spacing.begin() + static_cast<long>(spacing.size() / 2), spacing.end());
  profile.dt = spacing[spacing.size() / 2];
  return profile;
}

VelocityProfile lowpass_velocity(const VelocityProfile& profile, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be in (0, 1]");
  VelocityProfile out = profile;
  double y = 0.0;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double v = profile.samples[i].v;
    y = i == 0 ? v : alpha * v + (1.0 - alpha) * y;
    out.samples[i].v = std::max(0.0, y);
  }
  return out;
}

VelocityProfile remove_stops(const VelocityProfile& profile, double stop_threshold) {
  VelocityProfile out;
  out.dt = profile.dt;
  std::copy_if(profile.samples.begin(), profile.samples.end(), std::back_inserter(out.samples),
               [&](const VelocitySample& s) { return s.v >= stop_threshold; });
  if (out.samples.empty()) throw Error(ErrorCode::NoMovement, "all samples below stop threshold");
  return out;
}

VelocityProfile preprocess_ride(const Ride& ride, const FilterConfig& config) {
  config.validate();
  const auto smoothed = gaussian_smooth_positions(ride, config.gaussian_sigma, config.gaussian_window);
  return lowpass_velocity(compute_velocity_profile(smoothed), config.lowpass_alpha);
}

}  // namespace cycleflow
