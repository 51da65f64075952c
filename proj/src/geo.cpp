#include "mobsense/geo.hpp"

#include <cmath>

namespace mobsense {

namespace {
constexpr double kDegToRad = 0.017453292519943295;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDegToRad;
  const double p2 = lat2 * kDegToRad;
  const double dp = (lat2 - lat1) * kDegToRad;
  const double dl = (lon2 - lon1) * kDegToRad;
  const double a = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

PlanePoint LocalProjection::to_plane(double lat, double lon) const {
  const double cos0 = std::cos(origin_lat * kDegToRad);
  return {kEarthRadiusKm * 1000.0 * (lon - origin_lon) * kDegToRad * cos0,
          kEarthRadiusKm * 1000.0 * (lat - origin_lat) * kDegToRad};
}

void LocalProjection::to_geo(const PlanePoint& p, double& lat, double& lon) const {
  const double cos0 = std::cos(origin_lat * kDegToRad);
  lat = origin_lat + p.y_m / (kEarthRadiusKm * 1000.0) / kDegToRad;
  lon = origin_lon + p.x_m / (kEarthRadiusKm * 1000.0 * cos0) / kDegToRad;
}

double plane_distance_m(const PlanePoint& a, const PlanePoint& b) {
  const double dx = a.x_m - b.x_m;
  const double dy = a.y_m - b.y_m;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace mobsense
