#pragma once

namespace cycleflow::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

/// Great-circle distance on a spherical Earth, meters.
double haversine_m(LatLon a, LatLon b);

/// Point reached from `origin` after `distance_m` along the great circle with
/// initial bearing `bearing_deg` (clockwise from north).
LatLon destination(LatLon origin, double bearing_deg, double distance_m);

/// Shift by a small local east/north offset in meters (equirectangular).
LatLon offset_m(LatLon p, double east_m, double north_m);

}  // namespace cycleflow::geo
