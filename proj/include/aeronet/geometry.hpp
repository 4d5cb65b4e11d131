#ifndef AERONET_GEOMETRY_HPP
#define AERONET_GEOMETRY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aeronet/errors.hpp"

namespace aeronet::geo {

/// IUGG mean Earth radius; pins every metric length in the toolkit.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Kilometres per degree of latitude (and of longitude at the equator).
inline constexpr double kKmPerDeg = kEarthRadiusKm * 3.14159265358979323846 / 180.0;

struct GeoPoint {
  double lon = 0.0;           ///< degrees in [-180, 180]
  double lat = 0.0;           ///< degrees in [-90, 90]
  std::optional<double> alt;  ///< metres above mean sea level
};

/// Throws InvalidRegion if lon/lat are out of range or any coordinate is non-finite.
void validate_point(const GeoPoint& p);

struct BBox {
  double min_lon = 0.0, min_lat = 0.0, max_lon = 0.0, max_lat = 0.0;

  bool intersects(const BBox& o) const {
    return min_lon <= o.max_lon && o.min_lon <= max_lon && min_lat <= o.max_lat &&
           o.min_lat <= max_lat;
  }
  bool contains(double lon, double lat) const {
    return lon >= min_lon && lon <= max_lon && lat >= min_lat && lat <= max_lat;
  }
};

/// Polygon ring stored open (first vertex not repeated).
using Ring = std::vector<GeoPoint>;

/// A polygonal network node: one exterior ring plus optional holes, in raw
/// lon-lat coordinates. Rings must be simple, the exterior must have nonzero
/// area, and no ring may cross the antimeridian.
class Region {
 public:
  Region(std::string id, Ring exterior, std::vector<Ring> holes = {});

  const std::string& id() const { return id_; }
  const Ring& exterior() const { return exterior_; }
  const std::vector<Ring>& holes() const { return holes_; }
  const BBox& bbox() const { return bbox_; }
  const GeoPoint& centroid() const { return centroid_; }

  /// Planar shoelace area in deg^2 (exterior minus holes); used for overlap
  /// validation tolerances.
  double area_deg2() const { return area_deg2_; }

  /// Spherical polygon area in km^2 (exterior minus holes).
  double area_km2() const { return area_km2_; }

 private:
  std::string id_;
  Ring exterior_;
  std::vector<Ring> holes_;
  BBox bbox_;
  GeoPoint centroid_;
  double area_deg2_ = 0.0;
  double area_km2_ = 0.0;
};

/// One maximal time interval during which an interpolated path stays inside a
/// region, plus the haversine length of the clipped piece.
struct SubSegment {
  double t_enter = 0.0;   ///< seconds
  double t_exit = 0.0;    ///< seconds
  double length_km = 0.0;
};

struct TimedPoint {
  double t = 0.0;  ///< seconds
  GeoPoint p;
};

/// Closed point-in-region test: boundary points count as inside, interior
/// rings are holes (even-odd rule).
bool point_in_region(const GeoPoint& p, const Region& r);

/// Clips a time-stamped polyline (linear interpolation between fixes) against
/// a region. Crossing parameters come from exact segment/edge intersection in
/// lon-lat and are mapped back to time linearly. Sub-intervals are disjoint,
/// time-ordered, and of positive duration; measure-zero touches are dropped.
/// Throws DegenerateSegment when consecutive fixes share a timestamp.
std::vector<SubSegment> clip_polyline(std::span<const TimedPoint> points,
                                      const Region& r);

/// True when the interpolated path meets the closed region at all, including
/// measure-zero boundary touches (contact semantics).
bool polyline_touches(std::span<const TimedPoint> points, const Region& r);

/// Great-circle distance, Earth radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

/// Great-circle initial bearing in [0, 360), 0 = north, clockwise.
/// Throws CoincidentPoints when a and b share lon-lat.
double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b);

/// Destination reached travelling distance_km at the given initial bearing.
GeoPoint destination_point(const GeoPoint& start, double bearing_deg,
                           double distance_km);

/// n points uniform in r by rejection sampling from the bounding box.
/// Deterministic for a fixed seed. Throws SamplingStalled when the acceptance
/// rate drops below 1e-6.
std::vector<GeoPoint> sample_points(const Region& r, std::size_t n,
                                    std::uint64_t seed);

/// A disjoint collection of regions with a bounding-box index.
class Partition {
 public:
  /// Validates unique ids and pairwise-disjoint interiors within
  /// kOverlapToleranceDeg2. Throws OverlappingRegions / InvalidPartition.
  explicit Partition(std::vector<Region> regions);

  static constexpr double kOverlapToleranceDeg2 = 1e-9;

  const std::vector<Region>& regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }
  const Region& at(std::size_t i) const { return regions_[i]; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  /// Candidate region indices whose bbox intersects the query box, ascending.
  std::vector<std::size_t> query(const BBox& box) const;

  /// Indices of regions containing p (≥2 only possible on shared boundaries),
  /// ascending by region id.
  std::vector<std::size_t> locate(const GeoPoint& p) const;

 private:
  std::vector<Region> regions_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  // uniform-grid bucket index over region bboxes
  BBox extent_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;

  void build_index();
  void cell_range(const BBox& box, int& x0, int& x1, int& y0, int& y1) const;
};

/// Per-region arrival-location counts scaled linearly with spherical area:
/// count_i = clamp(round(min + (max-min) * area_i / max_area), min, max).
std::map<std::string, std::size_t> allocate_samples(const Partition& partition,
                                                    std::size_t min_count,
                                                    std::size_t max_count);

/// Exact area of the planar lon-lat intersection of two regions, in deg^2.
/// Green's-theorem accumulation; shared boundaries contribute zero.
double intersection_area_deg2(const Region& a, const Region& b);

}  // namespace aeronet::geo

#endif
