#include "aeronet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace aeronet::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
// dedupe tolerance for intersection parameters along one segment
constexpr double kParamEps = 1e-12;
// max distance (degrees) from an edge at which a point counts as boundary
constexpr double kOnEdgeTolDeg = 1e-12;

double rad(double deg) { return deg * kDegToRad; }

struct Vec2 {
  double x, y;
};

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

Vec2 to_vec(const GeoPoint& p) { return {p.lon, p.lat}; }

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d{b.x - a.x, b.y - a.y};
  const Vec2 ap{p.x - a.x, p.y - a.y};
  const double len2 = d.x * d.x + d.y * d.y;
  if (len2 == 0.0) return std::abs(ap.x) <= kOnEdgeTolDeg && std::abs(ap.y) <= kOnEdgeTolDeg;
  const double dist = std::abs(cross(d, ap)) / std::sqrt(len2);
  if (dist > kOnEdgeTolDeg) return false;
  const double t = (ap.x * d.x + ap.y * d.y) / len2;
  return t >= -kParamEps && t <= 1.0 + kParamEps;
}

// Intersection of segment p0->p1 with segment q0->q1, reported as parameters
// along p0->p1. Collinear overlaps yield both overlap endpoints.
void segment_intersection_params(const Vec2& p0, const Vec2& p1, const Vec2& q0,
                                 const Vec2& q1, std::vector<double>& out) {
  const Vec2 d{p1.x - p0.x, p1.y - p0.y};
  const Vec2 e{q1.x - q0.x, q1.y - q0.y};
  const Vec2 w{q0.x - p0.x, q0.y - p0.y};
  const double denom = cross(d, e);
  if (denom != 0.0) {
    const double u = cross(w, e) / denom;
    const double v = cross(w, d) / denom;
    if (u >= -kParamEps && u <= 1.0 + kParamEps && v >= -kParamEps &&
        v <= 1.0 + kParamEps) {
      out.push_back(std::clamp(u, 0.0, 1.0));
    }
    return;
  }
  // parallel; collinear only when q0 lies on the carrier line of p
  if (cross(d, w) != 0.0) return;
  const double len2 = d.x * d.x + d.y * d.y;
  if (len2 == 0.0) return;
  double u0 = ((q0.x - p0.x) * d.x + (q0.y - p0.y) * d.y) / len2;
  double u1 = ((q1.x - p0.x) * d.x + (q1.y - p0.y) * d.y) / len2;
  if (u0 > u1) std::swap(u0, u1);
  const double lo = std::max(0.0, u0);
  const double hi = std::min(1.0, u1);
  if (lo <= hi + kParamEps) {
    out.push_back(std::clamp(lo, 0.0, 1.0));
    out.push_back(std::clamp(hi, 0.0, 1.0));
  }
}

double ring_signed_area(const Ring& ring) {
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    s += a.lon * b.lat - b.lon * a.lat;
  }
  return 0.5 * s;
}

double ring_spherical_area_km2(const Ring& ring) {
  // Chamberlain-Duquette: adequate for the short edges used here.
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    s += rad(b.lon - a.lon) * (2.0 + std::sin(rad(a.lat)) + std::sin(rad(b.lat)));
  }
  return std::abs(s) * kEarthRadiusKm * kEarthRadiusKm / 2.0;
}

bool point_on_ring(const Vec2& p, const Ring& ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_on_segment(p, to_vec(ring[i]), to_vec(ring[(i + 1) % n]))) return true;
  }
  return false;
}

// Even-odd crossing parity; boundary points get no guarantee here, callers
// combine with point_on_ring.
bool point_in_ring_parity(const Vec2& p, const Ring& ring) {
  bool odd = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    if ((a.lat > p.y) != (b.lat > p.y)) {
      const double x_int = a.lon + (p.y - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.x < x_int) odd = !odd;
    }
  }
  return odd;
}

void check_ring_simple(const Ring& ring, const std::string& id) {
  const std::size_t n = ring.size();
  std::vector<double> params;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a0 = to_vec(ring[i]);
    const Vec2 a1 = to_vec(ring[(i + 1) % n]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2 b0 = to_vec(ring[j]);
      const Vec2 b1 = to_vec(ring[(j + 1) % n]);
      params.clear();
      segment_intersection_params(a0, a1, b0, b1, params);
      if (params.empty()) continue;
      if (!adjacent) {
        throw InvalidRegion("region '" + id + "': ring is self-intersecting");
      }
      if (params.size() > 1 && params.back() - params.front() > kParamEps) {
        throw InvalidRegion("region '" + id + "': ring backtracks on itself");
      }
    }
  }
}

Ring normalize_ring(Ring ring, const std::string& id, bool want_ccw) {
  if (ring.size() >= 2) {
    const GeoPoint& f = ring.front();
    const GeoPoint& l = ring.back();
    if (f.lon == l.lon && f.lat == l.lat) ring.pop_back();  // closed input
  }
  if (ring.size() < 3) {
    throw InvalidRegion("region '" + id + "': ring needs >= 3 distinct vertices");
  }
  for (const GeoPoint& p : ring) validate_point(p);
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % ring.size()];
    if (a.lon == b.lon && a.lat == b.lat) {
      throw InvalidRegion("region '" + id + "': repeated consecutive vertex");
    }
    if (std::abs(b.lon - a.lon) > 180.0) {
      throw InvalidRegion("region '" + id + "': ring crosses the antimeridian");
    }
  }
  const bool is_ccw = ring_signed_area(ring) > 0.0;
  if (is_ccw != want_ccw) std::reverse(ring.begin(), ring.end());
  return ring;
}

}  // namespace

void validate_point(const GeoPoint& p) {
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat) || p.lon < -180.0 ||
      p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0) {
    throw InvalidRegion("point (" + std::to_string(p.lon) + ", " +
                        std::to_string(p.lat) + ") out of lon-lat range");
  }
  if (p.alt && !std::isfinite(*p.alt)) {
    throw InvalidRegion("non-finite altitude");
  }
}

Region::Region(std::string id, Ring exterior, std::vector<Ring> holes)
    : id_(std::move(id)) {
  if (id_.empty()) throw InvalidRegion("region id must be non-empty");
  exterior_ = normalize_ring(std::move(exterior), id_, /*want_ccw=*/true);
  check_ring_simple(exterior_, id_);
  if (ring_signed_area(exterior_) == 0.0) {
    throw InvalidRegion("region '" + id_ + "': exterior ring has zero area");
  }
  holes_.reserve(holes.size());
  for (Ring& h : holes) {
    Ring hole = normalize_ring(std::move(h), id_, /*want_ccw=*/false);
    check_ring_simple(hole, id_);
    holes_.push_back(std::move(hole));
  }

  bbox_ = {exterior_[0].lon, exterior_[0].lat, exterior_[0].lon, exterior_[0].lat};
  for (const GeoPoint& p : exterior_) {
    bbox_.min_lon = std::min(bbox_.min_lon, p.lon);
    bbox_.max_lon = std::max(bbox_.max_lon, p.lon);
    bbox_.min_lat = std::min(bbox_.min_lat, p.lat);
    bbox_.max_lat = std::max(bbox_.max_lat, p.lat);
  }

  double area = ring_signed_area(exterior_);
  double cx = 0.0, cy = 0.0;
  auto accumulate_centroid = [&](const Ring& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const GeoPoint& a = ring[i];
      const GeoPoint& b = ring[(i + 1) % n];
      const double w = a.lon * b.lat - b.lon * a.lat;
      cx += (a.lon + b.lon) * w;
      cy += (a.lat + b.lat) * w;
    }
  };
  accumulate_centroid(exterior_);
  double sph = ring_spherical_area_km2(exterior_);
  for (const Ring& h : holes_) {
    area += ring_signed_area(h);  // holes are CW, so this subtracts
    accumulate_centroid(h);
    sph -= ring_spherical_area_km2(h);
  }
  area_deg2_ = area;
  area_km2_ = sph;
  centroid_ = GeoPoint{cx / (6.0 * area), cy / (6.0 * area), std::nullopt};
}

bool point_in_region(const GeoPoint& p, const Region& r) {
  const BBox& bb = r.bbox();
  if (p.lon < bb.min_lon - kOnEdgeTolDeg || p.lon > bb.max_lon + kOnEdgeTolDeg ||
      p.lat < bb.min_lat - kOnEdgeTolDeg || p.lat > bb.max_lat + kOnEdgeTolDeg) {
    return false;
  }
  const Vec2 v = to_vec(p);
  if (point_on_ring(v, r.exterior())) return true;
  for (const Ring& h : r.holes()) {
    if (point_on_ring(v, h)) return true;  // hole boundary is region boundary
  }
  bool odd = point_in_ring_parity(v, r.exterior());
  for (const Ring& h : r.holes()) {
    if (point_in_ring_parity(v, h)) odd = !odd;
  }
  return odd;
}

namespace {

void region_crossing_params(const Vec2& p0, const Vec2& p1, const Region& r,
                            std::vector<double>& out) {
  auto scan_ring = [&](const Ring& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      segment_intersection_params(p0, p1, to_vec(ring[i]), to_vec(ring[(i + 1) % n]),
                                  out);
    }
  };
  scan_ring(r.exterior());
  for (const Ring& h : r.holes()) scan_ring(h);
}

BBox polyline_bbox(std::span<const TimedPoint> points) {
  BBox b{points[0].p.lon, points[0].p.lat, points[0].p.lon, points[0].p.lat};
  for (const TimedPoint& tp : points) {
    b.min_lon = std::min(b.min_lon, tp.p.lon);
    b.max_lon = std::max(b.max_lon, tp.p.lon);
    b.min_lat = std::min(b.min_lat, tp.p.lat);
    b.max_lat = std::max(b.max_lat, tp.p.lat);
  }
  return b;
}

GeoPoint lerp_point(const GeoPoint& a, const GeoPoint& b, double u) {
  GeoPoint p;
  p.lon = a.lon + u * (b.lon - a.lon);
  p.lat = a.lat + u * (b.lat - a.lat);
  if (a.alt && b.alt) p.alt = *a.alt + u * (*b.alt - *a.alt);
  return p;
}

}  // namespace

std::vector<SubSegment> clip_polyline(std::span<const TimedPoint> points,
                                      const Region& r) {
  std::vector<SubSegment> result;
  if (points.size() < 2) return result;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1].t == points[i].t) {
      throw DegenerateSegment("consecutive fixes share timestamp " +
                              std::to_string(points[i].t));
    }
    if (points[i + 1].t < points[i].t) {
      throw std::invalid_argument("polyline not time-sorted");
    }
  }
  if (!polyline_bbox(points).intersects(r.bbox())) return result;

  bool open = false;
  SubSegment current{};
  std::vector<double> params;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const GeoPoint& a = points[i].p;
    const GeoPoint& b = points[i + 1].p;
    const double t0 = points[i].t;
    const double t1 = points[i + 1].t;

    params.clear();
    params.push_back(0.0);
    params.push_back(1.0);
    region_crossing_params(to_vec(a), to_vec(b), r, params);
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end(),
                             [](double x, double y) { return y - x <= kParamEps; }),
                 params.end());

    for (std::size_t k = 0; k + 1 < params.size(); ++k) {
      const double ua = params[k];
      const double ub = params[k + 1];
      const GeoPoint mid = lerp_point(a, b, 0.5 * (ua + ub));
      if (!point_in_region(mid, r)) {
        if (open) {
          result.push_back(current);
          open = false;
        }
        continue;
      }
      const double ta = (ua == 0.0) ? t0 : t0 + ua * (t1 - t0);
      const double tb = (ub == 1.0) ? t1 : t0 + ub * (t1 - t0);
      const double len = haversine_km(lerp_point(a, b, ua), lerp_point(a, b, ub));
      if (open && ta <= current.t_exit + 1e-9) {
        current.t_exit = tb;
        current.length_km += len;
      } else {
        if (open) result.push_back(current);
        current = SubSegment{ta, tb, len};
        open = true;
      }
    }
  }
  if (open) result.push_back(current);
  return result;
}

bool polyline_touches(std::span<const TimedPoint> points, const Region& r) {
  if (points.empty()) return false;
  const BBox pb = polyline_bbox(points);
  BBox padded = r.bbox();
  padded.min_lon -= kOnEdgeTolDeg;
  padded.min_lat -= kOnEdgeTolDeg;
  padded.max_lon += kOnEdgeTolDeg;
  padded.max_lat += kOnEdgeTolDeg;
  if (!pb.intersects(padded)) return false;
  for (const TimedPoint& tp : points) {
    if (point_in_region(tp.p, r)) return true;
  }
  std::vector<double> params;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    params.clear();
    region_crossing_params(to_vec(points[i].p), to_vec(points[i + 1].p), r, params);
    if (!params.empty()) return true;
  }
  return false;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = rad(a.lat);
  const double phi2 = rad(b.lat);
  const double dphi = rad(b.lat - a.lat);
  const double dlam = rad(b.lon - a.lon);
  const double s1 = std::sin(0.5 * dphi);
  const double s2 = std::sin(0.5 * dlam);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b) {
  if (a.lon == b.lon && a.lat == b.lat) {
    throw CoincidentPoints("bearing undefined for coincident points");
  }
  const double phi1 = rad(a.lat);
  const double phi2 = rad(b.lat);
  const double dlam = rad(b.lon - a.lon);
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x =
      std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  double deg = std::atan2(y, x) / kDegToRad;
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  return deg;
}

GeoPoint destination_point(const GeoPoint& start, double bearing_deg,
                           double distance_km) {
  const double delta = distance_km / kEarthRadiusKm;
  const double theta = rad(bearing_deg);
  const double phi1 = rad(start.lat);
  const double lam1 = rad(start.lon);
  const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) +
                                std::cos(phi1) * std::sin(delta) * std::cos(theta));
  const double lam2 =
      lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                        std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  double lon = lam2 / kDegToRad;
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return GeoPoint{lon, phi2 / kDegToRad, std::nullopt};
}

std::vector<GeoPoint> sample_points(const Region& r, std::size_t n,
                                    std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_points: n must be >= 1");
  std::mt19937_64 rng(seed);
  auto u01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
  const BBox& b = r.bbox();
  std::vector<GeoPoint> out;
  out.reserve(n);
  std::uint64_t consecutive_rejects = 0;
  while (out.size() < n) {
    GeoPoint p{b.min_lon + u01() * (b.max_lon - b.min_lon),
               b.min_lat + u01() * (b.max_lat - b.min_lat), std::nullopt};
    if (point_in_region(p, r)) {
      out.push_back(p);
      consecutive_rejects = 0;
    } else if (++consecutive_rejects >= 1000000) {
      throw SamplingStalled("region '" + r.id() +
                            "': rejection acceptance rate below 1e-6");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<Region> regions) : regions_(std::move(regions)) {
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    auto [it, inserted] = by_id_.emplace(regions_[i].id(), i);
    if (!inserted) {
      throw InvalidPartition("duplicate region id '" + regions_[i].id() + "'");
    }
  }
  build_index();
  // pairwise interior disjointness
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    for (std::size_t j : query(regions_[i].bbox())) {
      if (j <= i) continue;
      const double overlap = intersection_area_deg2(regions_[i], regions_[j]);
      if (overlap > kOverlapToleranceDeg2) {
        throw OverlappingRegions("regions '" + regions_[i].id() + "' and '" +
                                 regions_[j].id() + "' overlap by " +
                                 std::to_string(overlap) + " deg^2");
      }
    }
  }
}

void Partition::build_index() {
  if (regions_.empty()) {
    throw InvalidPartition("partition must contain at least one region");
  }
  extent_ = regions_[0].bbox();
  for (const Region& r : regions_) {
    extent_.min_lon = std::min(extent_.min_lon, r.bbox().min_lon);
    extent_.min_lat = std::min(extent_.min_lat, r.bbox().min_lat);
    extent_.max_lon = std::max(extent_.max_lon, r.bbox().max_lon);
    extent_.max_lat = std::max(extent_.max_lat, r.bbox().max_lat);
  }
  const int g = std::max(1, static_cast<int>(std::ceil(
                                std::sqrt(static_cast<double>(regions_.size())))));
  nx_ = ny_ = g;
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    int x0, x1, y0, y1;
    cell_range(regions_[i].bbox(), x0, x1, y0, y1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        buckets_[static_cast<std::size_t>(y) * nx_ + x].push_back(
            static_cast<std::uint32_t>(i));
      }
    }
  }
}

void Partition::cell_range(const BBox& box, int& x0, int& x1, int& y0, int& y1) const {
  const double w = extent_.max_lon - extent_.min_lon;
  const double h = extent_.max_lat - extent_.min_lat;
  auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); };
  x0 = w > 0 ? clampi(static_cast<int>((box.min_lon - extent_.min_lon) / w * nx_), 0,
                      nx_ - 1)
             : 0;
  x1 = w > 0 ? clampi(static_cast<int>((box.max_lon - extent_.min_lon) / w * nx_), 0,
                      nx_ - 1)
             : 0;
  y0 = h > 0 ? clampi(static_cast<int>((box.min_lat - extent_.min_lat) / h * ny_), 0,
                      ny_ - 1)
             : 0;
  y1 = h > 0 ? clampi(static_cast<int>((box.max_lat - extent_.min_lat) / h * ny_), 0,
                      ny_ - 1)
             : 0;
}

std::optional<std::size_t> Partition::index_of(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Partition::query(const BBox& box) const {
  if (!box.intersects(extent_)) return {};
  int x0, x1, y0, y1;
  cell_range(box, x0, x1, y0, y1);
  std::vector<std::size_t> out;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      for (std::uint32_t i : buckets_[static_cast<std::size_t>(y) * nx_ + x]) {
        if (regions_[i].bbox().intersects(box)) out.push_back(i);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> Partition::locate(const GeoPoint& p) const {
  std::vector<std::size_t> hits;
  for (std::size_t i : query(BBox{p.lon, p.lat, p.lon, p.lat})) {
    if (point_in_region(p, regions_[i])) hits.push_back(i);
  }
  std::sort(hits.begin(), hits.end(), [this](std::size_t a, std::size_t b) {
    return regions_[a].id() < regions_[b].id();
  });
  return hits;
}

std::map<std::string, std::size_t> allocate_samples(const Partition& partition,
                                                    std::size_t min_count,
                                                    std::size_t max_count) {
  if (min_count < 1 || max_count < min_count) {
    throw std::invalid_argument("allocate_samples: need 1 <= min <= max");
  }
  double max_area = 0.0;
  for (const Region& r : partition.regions()) max_area = std::max(max_area, r.area_km2());
  std::map<std::string, std::size_t> out;
  for (const Region& r : partition.regions()) {
    const double raw =
        static_cast<double>(min_count) +
        static_cast<double>(max_count - min_count) * r.area_km2() / max_area;
    const auto rounded = static_cast<std::size_t>(std::llround(raw));
    out[r.id()] = std::clamp(rounded, min_count, max_count);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Intersection area via Green's theorem over boundary pieces.

namespace {

struct OrientedRing {
  const Ring* ring;
  double sign;  // +1 exterior, -1 hole
};

std::vector<OrientedRing> oriented_rings(const Region& r) {
  std::vector<OrientedRing> out;
  out.push_back({&r.exterior(), 1.0});
  for (const Ring& h : r.holes()) out.push_back({&h, -1.0});
  return out;
}

bool point_strictly_in_ring(const Vec2& p, const Ring& ring) {
  if (point_on_ring(p, ring)) return false;
  return point_in_ring_parity(p, ring);
}

// Intersection area of two rings, each oriented CCW.
double ring_intersection_area(const Ring& a_in, const Ring& b_in) {
  Ring a = a_in;
  Ring b = b_in;
  if (ring_signed_area(a) < 0.0) std::reverse(a.begin(), a.end());
  if (ring_signed_area(b) < 0.0) std::reverse(b.begin(), b.end());

  std::vector<double> params;
  double total = 0.0;

  // Pieces of dA inside closed B; on-boundary pieces only when B's interior
  // lies to the left (so co-directed shared edges are counted exactly once).
  auto accumulate = [&params](const Ring& from, const Ring& against, bool primary,
                              double& acc) {
    const std::size_t n = from.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 p0 = to_vec(from[i]);
      const Vec2 p1 = to_vec(from[(i + 1) % n]);
      params.clear();
      params.push_back(0.0);
      params.push_back(1.0);
      const std::size_t m = against.size();
      for (std::size_t j = 0; j < m; ++j) {
        segment_intersection_params(p0, p1, to_vec(against[j]),
                                    to_vec(against[(j + 1) % m]), params);
      }
      std::sort(params.begin(), params.end());
      params.erase(
          std::unique(params.begin(), params.end(),
                      [](double x, double y) { return y - x <= kParamEps; }),
          params.end());
      for (std::size_t k = 0; k + 1 < params.size(); ++k) {
        const double ua = params[k];
        const double ub = params[k + 1];
        const Vec2 qa{p0.x + ua * (p1.x - p0.x), p0.y + ua * (p1.y - p0.y)};
        const Vec2 qb{p0.x + ub * (p1.x - p0.x), p0.y + ub * (p1.y - p0.y)};
        const Vec2 mid{0.5 * (qa.x + qb.x), 0.5 * (qa.y + qb.y)};
        bool counted;
        if (point_strictly_in_ring(mid, against)) {
          counted = true;
        } else if (primary && point_on_ring(mid, against)) {
          // shared-boundary piece: count it iff the other's interior is on
          // the left of this directed piece
          const double dx = qb.x - qa.x;
          const double dy = qb.y - qa.y;
          const double len = std::hypot(dx, dy);
          if (len == 0.0) continue;
          const double eps = 1e-9;
          const Vec2 probe{mid.x - dy / len * eps, mid.y + dx / len * eps};
          counted = point_strictly_in_ring(probe, against);
        } else {
          counted = false;
        }
        if (counted) acc += 0.5 * (qa.x * qb.y - qb.x * qa.y);
      }
    }
  };

  accumulate(a, b, /*primary=*/true, total);
  accumulate(b, a, /*primary=*/false, total);
  return std::max(0.0, total);
}

}  // namespace

double intersection_area_deg2(const Region& a, const Region& b) {
  if (!a.bbox().intersects(b.bbox())) return 0.0;
  double total = 0.0;
  for (const OrientedRing& ra : oriented_rings(a)) {
    for (const OrientedRing& rb : oriented_rings(b)) {
      const double piece = ring_intersection_area(*ra.ring, *rb.ring);
      total += ra.sign * rb.sign * piece;
    }
  }
  return std::max(0.0, total);
}

}  // namespace aeronet::geo
