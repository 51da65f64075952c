#pragma once

namespace mobsense {

inline constexpr double kEarthRadiusKm = 6371.0;

double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct PlanePoint {
  double x_m = 0;
  double y_m = 0;
};

// Equirectangular tangent-plane projection around a fixed origin,
// x = R*dlon*cos(lat0), y = R*dlat, in meters. Good at city scale.
struct LocalProjection {
  double origin_lat = 0;
  double origin_lon = 0;

  PlanePoint to_plane(double lat, double lon) const;
  void to_geo(const PlanePoint& p, double& lat, double& lon) const;
};

double plane_distance_m(const PlanePoint& a, const PlanePoint& b);

}  // namespace mobsense
