#include "aeronet/flowsim.hpp"

#include <cmath>
#include <cstdio>

#include "aeronet/errors.hpp"
#include "aeronet/parallel.hpp"

namespace aeronet::flow {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require_finite(std::initializer_list<double> params, const char* field) {
  for (double v : params) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string("non-finite parameter for field ") + field);
    }
  }
}
}  // namespace

VectorField::VectorField(std::string name, std::function<Vec2(double, Vec2)> fn)
    : name_(std::move(name)), fn_(std::move(fn)) {}

VectorField VectorField::uniform(double u, double v) {
  require_finite({u, v}, "uniform");
  return VectorField("uniform", [u, v](double, const Vec2&) { return Vec2{u, v}; });
}

VectorField VectorField::rotation(double omega, Vec2 center) {
  require_finite({omega, center.x, center.y}, "rotation");
  return VectorField("rotation", [omega, center](double, const Vec2& p) {
    return Vec2{-omega * (p.y - center.y), omega * (p.x - center.x)};
  });
}

VectorField VectorField::shear(double k) {
  require_finite({k}, "shear");
  return VectorField("shear", [k](double, const Vec2& p) { return Vec2{k * p.y, 0.0}; });
}

VectorField VectorField::double_gyre(double amplitude, double eps, double omega) {
  require_finite({amplitude, eps, omega}, "double_gyre");
  return VectorField("double_gyre", [amplitude, eps, omega](double t, const Vec2& p) {
    const double at = eps * std::sin(omega * t);
    const double bt = 1.0 - 2.0 * at;
    const double f = at * p.x * p.x + bt * p.x;
    const double dfdx = 2.0 * at * p.x + bt;
    return Vec2{-kPi * amplitude * std::sin(kPi * f) * std::cos(kPi * p.y),
                kPi * amplitude * std::cos(kPi * f) * std::sin(kPi * p.y) * dfdx};
  });
}

VectorField VectorField::custom(std::string name, std::function<Vec2(double, Vec2)> fn) {
  return VectorField(std::move(name), std::move(fn));
}

VectorField VectorField::from_cli(const std::string& name, double u, double v,
                                  double omega, Vec2 center, double k,
                                  double amplitude, double eps) {
  if (name == "uniform") return uniform(u, v);
  if (name == "rotation") return rotation(omega, center);
  if (name == "shear") return shear(k);
  if (name == "double_gyre") return double_gyre(amplitude, eps, omega);
  throw ValidationError("unknown field '" + name +
                        "' (expected uniform | rotation | shear | double_gyre)");
}

Vec2 integrate_flow(const VectorField& field, double s, double t, Vec2 x, double h) {
  if (h <= 0.0) throw std::invalid_argument("integrate_flow: h must be > 0");
  if (t == s) return x;
  const double span = t - s;
  const double steps_needed = std::ceil(std::abs(span) / h);
  if (steps_needed > 1e8) {
    throw std::invalid_argument("integrate_flow: |t-s|/h exceeds 1e8 steps");
  }
  const auto n = static_cast<std::int64_t>(steps_needed);
  const double dt = span / static_cast<double>(n);
  Vec2 u = x;
  double tc = s;
  for (std::int64_t i = 0; i < n; ++i) {
    const Vec2 k1 = field(tc, u);
    const Vec2 k2 = field(tc + 0.5 * dt, Vec2{u.x + 0.5 * dt * k1.x, u.y + 0.5 * dt * k1.y});
    const Vec2 k3 = field(tc + 0.5 * dt, Vec2{u.x + 0.5 * dt * k2.x, u.y + 0.5 * dt * k2.y});
    const Vec2 k4 = field(tc + dt, Vec2{u.x + dt * k3.x, u.y + dt * k3.y});
    u.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    u.y += dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    tc = s + static_cast<double>(i + 1) * dt;
    if (!std::isfinite(u.x) || !std::isfinite(u.y) ||
        std::hypot(u.x, u.y) > 1e12) {
      throw BlowUp("integration diverged for field '" + field.name() + "'");
    }
  }
  return u;
}

double flow_semigroup_residual(const VectorField& field, double s, double t_mid,
                               double t, Vec2 x, double h) {
  const Vec2 direct = integrate_flow(field, s, t, x, h);
  const Vec2 mid = integrate_flow(field, s, t_mid, x, h);
  const Vec2 composed = integrate_flow(field, t_mid, t, mid, h);
  return std::hypot(direct.x - composed.x, direct.y - composed.y);
}

double jacobian_det(const VectorField& field, double s, double t, Vec2 x, double h,
                    double fd_eps) {
  if (fd_eps <= 0.0) throw std::invalid_argument("jacobian_det: fd_eps must be > 0");
  const Vec2 xe1 = integrate_flow(field, s, t, Vec2{x.x + fd_eps, x.y}, h);
  const Vec2 xe0 = integrate_flow(field, s, t, Vec2{x.x - fd_eps, x.y}, h);
  const Vec2 ye1 = integrate_flow(field, s, t, Vec2{x.x, x.y + fd_eps}, h);
  const Vec2 ye0 = integrate_flow(field, s, t, Vec2{x.x, x.y - fd_eps}, h);
  const double j00 = (xe1.x - xe0.x) / (2.0 * fd_eps);
  const double j10 = (xe1.y - xe0.y) / (2.0 * fd_eps);
  const double j01 = (ye1.x - ye0.x) / (2.0 * fd_eps);
  const double j11 = (ye1.y - ye0.y) / (2.0 * fd_eps);
  return j00 * j11 - j01 * j10;
}

traj::TrajectoryCorpus generate_corpus(const VectorField& field,
                                       const CorpusSpec& spec) {
  if (spec.arrival_points.empty() || spec.arrival_times.empty()) {
    throw EmptyCorpus("corpus generation needs arrival points and arrival times");
  }
  if (spec.delta_seconds == 0) {
    throw std::invalid_argument("generate_corpus: delta must be nonzero");
  }
  if (spec.fix_interval_seconds <= 0) {
    throw std::invalid_argument("generate_corpus: fix interval must be positive");
  }

  // fix-time offsets relative to the sample time, ascending, endpoints exact
  std::vector<std::int64_t> offsets;
  if (spec.delta_seconds < 0) {
    offsets.push_back(spec.delta_seconds);
    while (offsets.back() + spec.fix_interval_seconds < 0) {
      offsets.push_back(offsets.back() + spec.fix_interval_seconds);
    }
    offsets.push_back(0);
  } else {
    offsets.push_back(0);
    while (offsets.back() + spec.fix_interval_seconds < spec.delta_seconds) {
      offsets.push_back(offsets.back() + spec.fix_interval_seconds);
    }
    offsets.push_back(spec.delta_seconds);
  }

  const std::size_t n_points = spec.arrival_points.size();
  const std::size_t n_times = spec.arrival_times.size();
  std::vector<traj::TrajectorySegment> segments(n_points * n_times);

  parallel_for(segments.size(), spec.threads, [&](std::size_t task) {
    const std::size_t l = task / n_times;
    const std::size_t k = task % n_times;
    const ArrivalPoint& arrival = spec.arrival_points[l];
    const double s = static_cast<double>(spec.arrival_times[k]);

    // walk the flow away from the arrival point, saving fixes along the way
    const std::size_t m = offsets.size();
    std::vector<Vec2> positions(m);
    if (spec.delta_seconds < 0) {
      positions[m - 1] = arrival.p;
      for (std::size_t j = m - 1; j > 0; --j) {
        positions[j - 1] = integrate_flow(
            field, s + static_cast<double>(offsets[j]),
            s + static_cast<double>(offsets[j - 1]), positions[j], spec.step_seconds);
      }
    } else {
      positions[0] = arrival.p;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        positions[j + 1] = integrate_flow(
            field, s + static_cast<double>(offsets[j]),
            s + static_cast<double>(offsets[j + 1]), positions[j], spec.step_seconds);
      }
    }

    traj::TrajectorySegment seg;
    char id[40];
    std::snprintf(id, sizeof(id), "b%03zu_s%03zu", l, k);
    seg.traj_id = id;
    seg.sample_time = spec.arrival_times[k];
    seg.receptor_region = arrival.receptor_region;
    seg.fixes.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double lon = spec.anchor.lon + positions[j].x;
      const double lat = spec.anchor.lat + positions[j].y;
      if (lon < -180.0 || lon > 180.0 || lat < -90.0 || lat > 90.0) {
        throw BlowUp("trajectory left the lon-lat domain");
      }
      seg.fixes.push_back(traj::Fix{spec.arrival_times[k] + offsets[j],
                                    geo::GeoPoint{lon, lat, std::nullopt}});
    }
    seg.origin = (spec.delta_seconds < 0) ? seg.fixes.back().p : seg.fixes.front().p;
    if (spec.emit_jacdet) {
      std::vector<double> jd(m);
      for (std::size_t j = 0; j < m; ++j) {
        jd[j] = std::abs(jacobian_det(field, s, s + static_cast<double>(offsets[j]),
                                      arrival.p, spec.step_seconds, spec.fd_eps));
      }
      seg.covariates.emplace("jacdet", std::move(jd));
    }
    segments[task] = std::move(seg);
  });

  return traj::make_corpus(std::move(segments));
}

}  // namespace aeronet::flow
