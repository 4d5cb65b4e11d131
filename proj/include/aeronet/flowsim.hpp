#ifndef AERONET_FLOWSIM_HPP
#define AERONET_FLOWSIM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aeronet/trajectory.hpp"

namespace aeronet::flow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// A named planar velocity field F(t, p). The built-in fields are all smooth
/// and Lipschitz on bounded domains; uniform, rotation, shear and double_gyre
/// are divergence-free.
class VectorField {
 public:
  static VectorField uniform(double u, double v);
  static VectorField rotation(double omega, Vec2 center = {});
  static VectorField shear(double k);
  /// Periodically perturbed two-cell gyre on [0,2]x[0,1].
  static VectorField double_gyre(double amplitude = 0.1, double eps = 0.25,
                                 double omega = 0.6283185307179586);
  static VectorField custom(std::string name, std::function<Vec2(double, Vec2)> fn);

  /// Parses "uniform" | "rotation" | "shear" | "double_gyre" with parameters.
  static VectorField from_cli(const std::string& name, double u, double v,
                              double omega, Vec2 center, double k, double amplitude,
                              double eps);

  Vec2 operator()(double t, const Vec2& p) const { return fn_(t, p); }
  const std::string& name() const { return name_; }

 private:
  VectorField(std::string name, std::function<Vec2(double, Vec2)> fn);
  std::string name_;
  std::function<Vec2(double, Vec2)> fn_;
};

/// Classical fixed-step RK4 solution of du/dt = F(t, u), u(s) = x, evaluated
/// at time t; t < s integrates with negative steps. Throws BlowUp when the
/// state norm exceeds 1e12.
Vec2 integrate_flow(const VectorField& field, double s, double t, Vec2 x, double h);

/// || phi(t,s,x) - phi(t,t_mid, phi(t_mid,s,x)) ||
double flow_semigroup_residual(const VectorField& field, double s, double t_mid,
                               double t, Vec2 x, double h);

/// Determinant of the flow map's spatial Jacobian at x via central finite
/// differences with spacing fd_eps.
double jacobian_det(const VectorField& field, double s, double t, Vec2 x, double h,
                    double fd_eps);

struct ArrivalPoint {
  Vec2 p;  ///< planar position, interpreted as lon-lat offsets from the anchor
  std::optional<std::string> receptor_region;
};

struct CorpusSpec {
  std::vector<ArrivalPoint> arrival_points;
  std::vector<std::int64_t> arrival_times;  ///< Unix seconds
  std::int64_t delta_seconds = 0;           ///< signed lag, negative = backward
  double step_seconds = 60.0;               ///< RK4 step
  std::int64_t fix_interval_seconds = 3600;
  geo::GeoPoint anchor{0.0, 0.0, std::nullopt};
  bool emit_jacdet = false;  ///< adds a "jacdet" covariate column
  double fd_eps = 1e-4;
  unsigned threads = 1;
};

/// Synthetic TrajCsvV1-compatible corpus with one segment per
/// (arrival point, arrival time) pair, ordered point-major.
traj::TrajectoryCorpus generate_corpus(const VectorField& field,
                                       const CorpusSpec& spec);

}  // namespace aeronet::flow

#endif
