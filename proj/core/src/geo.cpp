#include "cycleflow/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cycleflow::geo {
namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

double haversine_m(LatLon a, LatLon b) {
  const double phi1 = a.lat * kDeg;
  const double phi2 = b.lat * kDeg;
  const double dphi = (b.lat - a.lat) * kDeg;
  const double dlambda = (b.lon - a.lon) * kDeg;
  const double s_phi = std::sin(dphi / 2.0);
  const double s_lambda = std::sin(dlambda / 2.0);
  const double h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda * s_lambda;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

LatLon destination(LatLon origin, double bearing_deg, double distance_m) {
  const double delta = distance_m / kEarthRadiusM;
  const double theta = bearing_deg * kDeg;
  const double phi1 = origin.lat * kDeg;
  const double lambda1 = origin.lon * kDeg;
  const double sin_phi2 =
      std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * sin_phi2);
  return {phi2 / kDeg, lambda2 / kDeg};
}

LatLon offset_m(LatLon p, double east_m, double north_m) {
  const double dlat = north_m / kEarthRadiusM / kDeg;
  const double dlon = east_m / (kEarthRadiusM * std::cos(p.lat * kDeg)) / kDeg;
  return {p.lat + dlat, p.lon + dlon};
}

}  // namespace cycleflow::geo
