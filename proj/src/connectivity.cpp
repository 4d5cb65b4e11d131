#include "aeronet/connectivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "aeronet/errors.hpp"
#include "aeronet/summation.hpp"

namespace aeronet::conn {

// ---------------------------------------------------------------------------
// measure specs

ZSpec ZSpec::constant(double value) {
  if (!std::isfinite(value)) throw ValidationError("Z constant must be finite");
  ZSpec z;
  z.is_constant = true;
  z.value = value;
  return z;
}

ZSpec ZSpec::origin_covariate(std::string name) {
  ZSpec z;
  z.is_constant = false;
  z.name = std::move(name);
  return z;
}

std::string ZSpec::describe() const {
  if (is_constant) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
  }
  return name;
}

ZTildeSpec ZTildeSpec::one() { return ZTildeSpec{}; }

ZTildeSpec ZTildeSpec::column(std::string name) {
  ZTildeSpec zt;
  zt.kind = Kind::column;
  zt.name = std::move(name);
  return zt;
}

ZTildeSpec ZTildeSpec::alt_below(double threshold_m) {
  if (!std::isfinite(threshold_m)) {
    throw ValidationError("alt_below threshold must be finite");
  }
  ZTildeSpec zt;
  zt.kind = Kind::alt_below;
  zt.threshold_m = threshold_m;
  return zt;
}

std::string ZTildeSpec::describe() const {
  switch (kind) {
    case Kind::one: return "1";
    case Kind::column: return name;
    case Kind::alt_below: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "alt_below(%g)", threshold_m);
      return buf;
    }
  }
  return "?";
}

PointwiseMeasure PointwiseMeasure::contact() { return PointwiseMeasure{}; }

PointwiseMeasure PointwiseMeasure::contact_min_length(double min_length_km) {
  if (!(min_length_km >= 0.0)) {
    throw ValidationError("contact_min_length: min length must be >= 0");
  }
  PointwiseMeasure m;
  m.kind = MeasureKind::contact_min_length;
  m.min_length_km = min_length_km;
  return m;
}

PointwiseMeasure PointwiseMeasure::duration() {
  PointwiseMeasure m;
  m.kind = MeasureKind::duration;
  return m;
}

PointwiseMeasure PointwiseMeasure::length() {
  PointwiseMeasure m;
  m.kind = MeasureKind::length;
  return m;
}

PointwiseMeasure PointwiseMeasure::volume() {
  PointwiseMeasure m;
  m.kind = MeasureKind::volume;
  return m;
}

PointwiseMeasure PointwiseMeasure::field(std::string g_east, std::string g_north) {
  if (g_east.empty() || g_north.empty()) {
    throw ValidationError("field measure needs both covariate names");
  }
  PointwiseMeasure m;
  m.kind = MeasureKind::field;
  m.g_east = std::move(g_east);
  m.g_north = std::move(g_north);
  return m;
}

PointwiseMeasure PointwiseMeasure::covariate(ZSpec z, ZTildeSpec ztilde) {
  PointwiseMeasure m;
  m.kind = MeasureKind::covariate;
  m.z = std::move(z);
  m.ztilde = std::move(ztilde);
  return m;
}

PointwiseMeasure PointwiseMeasure::covariate_measure(ZSpec z, ZTildeSpec ztilde,
                                                     std::vector<Event> events) {
  for (const Event& e : events) {
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("event weights must be non-negative");
    }
  }
  PointwiseMeasure m;
  m.kind = MeasureKind::covariate_measure;
  m.z = std::move(z);
  m.ztilde = std::move(ztilde);
  m.events = std::move(events);
  return m;
}

std::string PointwiseMeasure::descriptor() const {
  char buf[160];
  switch (kind) {
    case MeasureKind::contact:
      return "contact";
    case MeasureKind::contact_min_length:
      std::snprintf(buf, sizeof(buf), "contact_min_length(%g)", min_length_km);
      return buf;
    case MeasureKind::duration:
      return "duration";
    case MeasureKind::length:
      return "length";
    case MeasureKind::volume:
      return "volume";
    case MeasureKind::field:
      std::snprintf(buf, sizeof(buf), "field(%s,%s)", g_east.c_str(), g_north.c_str());
      return buf;
    case MeasureKind::covariate:
      std::snprintf(buf, sizeof(buf), "covariate(z=%s,zt=%s)", z.describe().c_str(),
                    ztilde.describe().c_str());
      return buf;
    case MeasureKind::covariate_measure:
      std::snprintf(buf, sizeof(buf), "covariate_measure(z=%s,zt=%s,events=%zu)",
                    z.describe().c_str(), ztilde.describe().c_str(), events.size());
      return buf;
  }
  return "?";
}

void validate_measure_against(const PointwiseMeasure& measure,
                              const traj::TrajectoryCorpus& corpus) {
  auto has = [&corpus](const std::string& name) {
    return std::find(corpus.covariate_names.begin(), corpus.covariate_names.end(),
                     name) != corpus.covariate_names.end();
  };
  switch (measure.kind) {
    case MeasureKind::volume:
      if (!has("jacdet")) {
        throw MissingJacobian("volume measure needs a 'cov:jacdet' column");
      }
      break;
    case MeasureKind::field:
      if (!has(measure.g_east) || !has(measure.g_north)) {
        throw MissingCovariate("field measure needs covariates '" + measure.g_east +
                               "' and '" + measure.g_north + "'");
      }
      break;
    case MeasureKind::covariate:
    case MeasureKind::covariate_measure:
      if (!measure.z.is_constant && !has(measure.z.name)) {
        throw MissingCovariate("Z covariate '" + measure.z.name + "' not in corpus");
      }
      if (measure.ztilde.kind == ZTildeSpec::Kind::column && !has(measure.ztilde.name)) {
        throw MissingCovariate("Ztilde covariate '" + measure.ztilde.name +
                               "' not in corpus");
      }
      break;
    default:
      break;
  }
}

// ---------------------------------------------------------------------------
// per-segment helpers

namespace {

const std::vector<double>& covariate_column(const traj::TrajectorySegment& seg,
                                            const std::string& name) {
  auto it = seg.covariates.find(name);
  if (it == seg.covariates.end()) {
    throw MissingCovariate("segment '" + seg.traj_id + "' lacks covariate '" + name +
                           "'");
  }
  return it->second;
}

std::size_t origin_fix_index(const traj::TrajectorySegment& seg) {
  return seg.sample_time == seg.fixes.front().t ? 0 : seg.fixes.size() - 1;
}

double z_factor(const traj::TrajectorySegment& seg, const ZSpec& z) {
  if (z.is_constant) return z.value;
  return covariate_column(seg, z.name)[origin_fix_index(seg)];
}

// linear interpolation of a per-fix sample array at time t
double sample_at(const std::vector<traj::Fix>& fixes, const std::vector<double>& g,
                 double t, std::size_t& hint) {
  while (hint + 2 < fixes.size() && static_cast<double>(fixes[hint + 1].t) < t) ++hint;
  const double t0 = static_cast<double>(fixes[hint].t);
  const double t1 = static_cast<double>(fixes[hint + 1].t);
  if (t <= t0) return g[hint];
  if (t >= t1) return g[hint + 1];
  const double u = (t - t0) / (t1 - t0);
  return g[hint] + u * (g[hint + 1] - g[hint]);
}

// trapezoid integral of the piecewise-linear interpolant of g over the
// clipped inside-intervals, split exactly at fix times
double integrate_inside_linear(const traj::TrajectorySegment& seg,
                               const std::vector<geo::SubSegment>& intervals,
                               const std::vector<double>& g) {
  const auto& fixes = seg.fixes;
  if (fixes.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t hint = 0;
  for (const geo::SubSegment& iv : intervals) {
    std::size_t h2 = hint;
    double t_prev = iv.t_enter;
    double g_prev = sample_at(fixes, g, t_prev, h2);
    // advance over fix times strictly inside the interval
    std::size_t j = h2 + 1;
    while (j < fixes.size() && static_cast<double>(fixes[j].t) <= iv.t_enter) ++j;
    for (; j < fixes.size() && static_cast<double>(fixes[j].t) < iv.t_exit; ++j) {
      const double tj = static_cast<double>(fixes[j].t);
      total += 0.5 * (g_prev + g[j]) * (tj - t_prev);
      t_prev = tj;
      g_prev = g[j];
    }
    const double g_end = sample_at(fixes, g, iv.t_exit, h2);
    total += 0.5 * (g_prev + g_end) * (iv.t_exit - t_prev);
    hint = h2;
  }
  return total;
}

double altitude_at_fix(const traj::TrajectorySegment& seg, std::size_t i) {
  if (!seg.fixes[i].p.alt) {
    throw MissingCovariate("segment '" + seg.traj_id +
                           "' lacks altitude needed by alt_below");
  }
  return *seg.fixes[i].p.alt;
}

// exact time measure of {alt(t) <= h} within the inside-intervals, altitude
// linear between fixes
double measure_alt_below(const traj::TrajectorySegment& seg,
                         const std::vector<geo::SubSegment>& intervals,
                         double threshold) {
  const auto& fixes = seg.fixes;
  if (fixes.size() < 2) return 0.0;
  double total = 0.0;
  for (const geo::SubSegment& iv : intervals) {
    for (std::size_t i = 0; i + 1 < fixes.size(); ++i) {
      const double t0 = static_cast<double>(fixes[i].t);
      const double t1 = static_cast<double>(fixes[i + 1].t);
      const double c = std::max(t0, iv.t_enter);
      const double d = std::min(t1, iv.t_exit);
      if (d <= c) continue;
      const double a0 = altitude_at_fix(seg, i);
      const double a1 = altitude_at_fix(seg, i + 1);
      const double ac = a0 + (c - t0) / (t1 - t0) * (a1 - a0);
      const double ad = a0 + (d - t0) / (t1 - t0) * (a1 - a0);
      if (ac <= threshold && ad <= threshold) {
        total += d - c;
      } else if (ac <= threshold || ad <= threshold) {
        const double t_cross = c + (threshold - ac) * (d - c) / (ad - ac);
        total += (ac <= threshold) ? (t_cross - c) : (d - t_cross);
      }
    }
  }
  return total;
}

std::array<double, 2> displacement_km(const geo::GeoPoint& a, const geo::GeoPoint& b) {
  const double mid_lat = 0.5 * (a.lat + b.lat) * 3.14159265358979323846 / 180.0;
  return {(b.lon - a.lon) * geo::kKmPerDeg * std::cos(mid_lat),
          (b.lat - a.lat) * geo::kKmPerDeg};
}

// per-fix path velocity (km/s, east-north), centred differences with
// one-sided ends
std::vector<std::array<double, 2>> fix_velocities(const traj::TrajectorySegment& seg) {
  const auto& fixes = seg.fixes;
  std::vector<std::array<double, 2>> v(fixes.size(), {0.0, 0.0});
  if (fixes.size() < 2) return v;
  for (std::size_t i = 0; i < fixes.size(); ++i) {
    const std::size_t lo = (i == 0) ? 0 : i - 1;
    const std::size_t hi = (i + 1 == fixes.size()) ? i : i + 1;
    const auto d = displacement_km(fixes[lo].p, fixes[hi].p);
    const double dt = static_cast<double>(fixes[hi].t - fixes[lo].t);
    v[i] = {d[0] / dt, d[1] / dt};
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// pointwise connectivities

double psi_contact(const traj::TrajectorySegment& seg, const geo::Region& a) {
  const auto pts = seg.timed_points();
  return geo::polyline_touches(pts, a) ? 1.0 : 0.0;
}

double psi_contact_min_length(const traj::TrajectorySegment& seg,
                              const geo::Region& a, double min_length_km) {
  if (!(min_length_km >= 0.0)) {
    throw std::invalid_argument("min_length_km must be >= 0");
  }
  return psi_length(seg, a) > min_length_km ? 1.0 : 0.0;
}

double psi_duration(const traj::TrajectorySegment& seg, const geo::Region& a) {
  const auto pts = seg.timed_points();
  double total = 0.0;
  for (const geo::SubSegment& s : geo::clip_polyline(pts, a)) {
    total += s.t_exit - s.t_enter;
  }
  return total;
}

double psi_length(const traj::TrajectorySegment& seg, const geo::Region& a) {
  const auto pts = seg.timed_points();
  double total = 0.0;
  for (const geo::SubSegment& s : geo::clip_polyline(pts, a)) {
    total += s.length_km;
  }
  return total;
}

double psi_volume(const traj::TrajectorySegment& seg, const geo::Region& a) {
  auto it = seg.covariates.find("jacdet");
  if (it == seg.covariates.end()) {
    throw MissingJacobian("segment '" + seg.traj_id +
                          "' has no 'jacdet' covariate; supply cov:jacdet or "
                          "generate the corpus with Jacobians");
  }
  std::vector<double> g = it->second;
  for (double& v : g) v = std::abs(v);
  const auto pts = seg.timed_points();
  return integrate_inside_linear(seg, geo::clip_polyline(pts, a), g);
}

double psi_field(const traj::TrajectorySegment& seg, const geo::Region& a,
                 const std::string& g_east, const std::string& g_north) {
  const auto& ge = covariate_column(seg, g_east);
  const auto& gn = covariate_column(seg, g_north);
  const auto vel = fix_velocities(seg);
  std::vector<double> g(seg.fixes.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = std::abs(vel[i][0] * ge[i] + vel[i][1] * gn[i]);
  }
  const auto pts = seg.timed_points();
  return integrate_inside_linear(seg, geo::clip_polyline(pts, a), g);
}

double psi_covariate(const traj::TrajectorySegment& seg, const geo::Region& a,
                     const ZSpec& z, const ZTildeSpec& ztilde) {
  const double zf = z_factor(seg, z);
  const auto pts = seg.timed_points();
  const auto intervals = geo::clip_polyline(pts, a);
  switch (ztilde.kind) {
    case ZTildeSpec::Kind::one: {
      // the quadrature of a constant is the interval measure itself
      double total = 0.0;
      for (const geo::SubSegment& s : intervals) total += s.t_exit - s.t_enter;
      return zf * total;
    }
    case ZTildeSpec::Kind::column:
      return zf * integrate_inside_linear(seg, intervals,
                                          covariate_column(seg, ztilde.name));
    case ZTildeSpec::Kind::alt_below:
      return zf * measure_alt_below(seg, intervals, ztilde.threshold_m);
  }
  return 0.0;
}

double psi_covariate_measure(const traj::TrajectorySegment& seg,
                             const geo::Region& a, const ZSpec& z,
                             const ZTildeSpec& ztilde,
                             const std::vector<Event>& events) {
  if (events.empty()) return 0.0;
  const double zf = z_factor(seg, z);
  const auto& fixes = seg.fixes;
  double total = 0.0;
  for (const Event& e : events) {
    const auto t = static_cast<double>(e.t);
    if (fixes.size() < 2 || t < static_cast<double>(fixes.front().t) ||
        t > static_cast<double>(fixes.back().t)) {
      continue;  // outside the segment's interval
    }
    std::size_t i = 0;
    while (i + 2 < fixes.size() && static_cast<double>(fixes[i + 1].t) < t) ++i;
    const double t0 = static_cast<double>(fixes[i].t);
    const double t1 = static_cast<double>(fixes[i + 1].t);
    const double u = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    geo::GeoPoint p;
    p.lon = fixes[i].p.lon + u * (fixes[i + 1].p.lon - fixes[i].p.lon);
    p.lat = fixes[i].p.lat + u * (fixes[i + 1].p.lat - fixes[i].p.lat);
    if (fixes[i].p.alt && fixes[i + 1].p.alt) {
      p.alt = *fixes[i].p.alt + u * (*fixes[i + 1].p.alt - *fixes[i].p.alt);
    }
    if (!geo::point_in_region(p, a)) continue;
    double zt = 1.0;
    switch (ztilde.kind) {
      case ZTildeSpec::Kind::one:
        break;
      case ZTildeSpec::Kind::column: {
        const auto& col = covariate_column(seg, ztilde.name);
        zt = col[i] + u * (col[i + 1] - col[i]);
        break;
      }
      case ZTildeSpec::Kind::alt_below: {
        if (!p.alt) {
          throw MissingCovariate("segment '" + seg.traj_id +
                                 "' lacks altitude needed by alt_below");
        }
        zt = (*p.alt <= ztilde.threshold_m) ? 1.0 : 0.0;
        break;
      }
    }
    total += e.weight * zt;
  }
  return zf * total;
}

double eval_pointwise(const PointwiseMeasure& measure,
                      const traj::TrajectorySegment& seg, const geo::Region& a) {
  switch (measure.kind) {
    case MeasureKind::contact:
      return psi_contact(seg, a);
    case MeasureKind::contact_min_length:
      return psi_contact_min_length(seg, a, measure.min_length_km);
    case MeasureKind::duration:
      return psi_duration(seg, a);
    case MeasureKind::length:
      return psi_length(seg, a);
    case MeasureKind::volume:
      return psi_volume(seg, a);
    case MeasureKind::field:
      return psi_field(seg, a, measure.g_east, measure.g_north);
    case MeasureKind::covariate:
      return psi_covariate(seg, a, measure.z, measure.ztilde);
    case MeasureKind::covariate_measure:
      return psi_covariate_measure(seg, a, measure.z, measure.ztilde, measure.events);
  }
  return 0.0;
}

double estimate_integrated(const traj::TrajectoryCorpus& window,
                           const geo::Region& receptor, const geo::Region& source,
                           const PointwiseMeasure& measure,
                           const EstimatorConfig& cfg) {
  if (!(cfg.t_length > 0.0)) throw ValidationError("|T| must be > 0");
  std::vector<double> values;
  for (const traj::TrajectorySegment& seg : window.segments) {
    const bool selected =
        seg.receptor_region ? (*seg.receptor_region == receptor.id())
                            : geo::point_in_region(seg.origin, receptor);
    if (!selected) continue;
    values.push_back(eval_pointwise(measure, seg, source));
  }
  if (values.empty()) {
    throw NoSamples("no segments arrive in region '" + receptor.id() + "'");
  }
  const double count = static_cast<double>(values.size());
  const double mean = canonical_sum(values) / count;
  return mean * (cfg.t_length * cfg.b_area(receptor));
}

}  // namespace aeronet::conn
