#pragma once

#include <vector>

#include "cycleflow/ride.hpp"

namespace cycleflow {

struct VelocitySample {
  double t = 0.0;  // seconds from ride start
  double v = 0.0;  // m/s
};

struct VelocityProfile {
  std::vector<VelocitySample> samples;
  double dt = 3.0;  // nominal spacing

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

struct FilterConfig {
  double gaussian_sigma = 2.0;    // samples
  std::size_t gaussian_window = 7;  // samples, odd
  double lowpass_alpha = 0.5;
  double stop_threshold = 0.5;  // m/s

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

/// Normalized kernel weights for lags -w/2..w/2.
std::vector<double> gaussian_kernel(double sigma, std::size_t window);

/// Kernel-weighted average of lat/lon over a centered window. Near the ends
/// the window is truncated and the remaining weights renormalized.
Ride gaussian_smooth_positions(const Ride& ride, double sigma, std::size_t window);

/// Interval speeds between consecutive fixes via haversine distance; the
/// profile has one sample fewer than the ride, stamped at interval start.
VelocityProfile compute_velocity_profile(const Ride& ride);

/// y_0 = v_0, y_i = alpha v_i + (1 - alpha) y_{i-1}, clamped at zero.
VelocityProfile lowpass_velocity(const VelocityProfile& profile, double alpha);

/// Throws Error{NoMovement} when nothing is left.
VelocityProfile remove_stops(const VelocityProfile& profile, double stop_threshold);

/// Smooth, differentiate, and low-pass a ride.
VelocityProfile preprocess_ride(const Ride& ride, const FilterConfig& config = {});

}  // namespace cycleflow
