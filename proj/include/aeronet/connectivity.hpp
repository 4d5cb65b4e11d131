#ifndef AERONET_CONNECTIVITY_HPP
#define AERONET_CONNECTIVITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "aeronet/geometry.hpp"
#include "aeronet/trajectory.hpp"

namespace aeronet::conn {

enum class MeasureKind {
  contact,
  contact_min_length,
  duration,
  length,
  volume,
  field,
  covariate,
  covariate_measure,
};

/// Origin-time factor Z(s, x): a constant or a fix covariate evaluated at the
/// origin fix.
struct ZSpec {
  static ZSpec constant(double value);
  static ZSpec origin_covariate(std::string name);

  bool is_constant = true;
  double value = 1.0;
  std::string name;
  std::string describe() const;
};

/// Along-path factor evaluated at (v, phi(v,s,x)): constant one, a fix
/// covariate column, or the built-in altitude threshold indicator.
struct ZTildeSpec {
  enum class Kind { one, column, alt_below };
  static ZTildeSpec one();
  static ZTildeSpec column(std::string name);
  static ZTildeSpec alt_below(double threshold_m);

  Kind kind = Kind::one;
  std::string name;
  double threshold_m = 0.0;
  std::string describe() const;
};

/// A discrete-time event contributing through the measure-variant kernel.
struct Event {
  std::int64_t t = 0;  ///< Unix seconds
  double weight = 0.0;
};

/// Which pointwise connectivity to evaluate, with its parameters.
struct PointwiseMeasure {
  static PointwiseMeasure contact();
  static PointwiseMeasure contact_min_length(double min_length_km);
  static PointwiseMeasure duration();
  static PointwiseMeasure length();
  static PointwiseMeasure volume();
  static PointwiseMeasure field(std::string g_east, std::string g_north);
  static PointwiseMeasure covariate(ZSpec z, ZTildeSpec ztilde);
  static PointwiseMeasure covariate_measure(ZSpec z, ZTildeSpec ztilde,
                                            std::vector<Event> events);

  MeasureKind kind = MeasureKind::contact;
  double min_length_km = 0.0;
  ZSpec z;
  ZTildeSpec ztilde;
  std::string g_east, g_north;
  std::vector<Event> events;

  /// Stable one-line summary recorded in output file headers.
  std::string descriptor() const;
};

/// Throws MissingCovariate/MissingJacobian when the measure references
/// columns the corpus does not carry.
void validate_measure_against(const PointwiseMeasure& measure,
                              const traj::TrajectoryCorpus& corpus);

// -- pointwise connectivities ------------------------------------------------

/// 1 iff the interpolated path meets the closed region (contact).
double psi_contact(const traj::TrajectorySegment& seg, const geo::Region& a);

/// 1 iff the clipped length strictly exceeds min_length_km.
double psi_contact_min_length(const traj::TrajectorySegment& seg,
                              const geo::Region& a, double min_length_km);

/// Seconds spent inside the region; multiple passes sum.
double psi_duration(const traj::TrajectorySegment& seg, const geo::Region& a);

/// Kilometres travelled inside the region.
double psi_length(const traj::TrajectorySegment& seg, const geo::Region& a);

/// Time integral of |det J| over the inside intervals; the Jacobian
/// determinant rides on the "jacdet" covariate column.
double psi_volume(const traj::TrajectorySegment& seg, const geo::Region& a);

/// Time integral of |<path velocity, G>| over the inside intervals, with G
/// read from two covariate columns (km/s east-north at each fix).
double psi_field(const traj::TrajectorySegment& seg, const geo::Region& a,
                 const std::string& g_east, const std::string& g_north);

/// Z(s,x) times the along-path integral of ztilde over the inside intervals.
double psi_covariate(const traj::TrajectorySegment& seg, const geo::Region& a,
                     const ZSpec& z, const ZTildeSpec& ztilde);

/// Z(s,x) times the event-weighted sum of ztilde at in-region event times.
double psi_covariate_measure(const traj::TrajectorySegment& seg,
                             const geo::Region& a, const ZSpec& z,
                             const ZTildeSpec& ztilde,
                             const std::vector<Event>& events);

/// Dispatches on measure.kind.
double eval_pointwise(const PointwiseMeasure& measure,
                      const traj::TrajectorySegment& seg, const geo::Region& a);

// -- estimator ----------------------------------------------------------------

struct EstimatorConfig {
  double t_length = 1.0;  ///< |T|
  enum class BAreaMode { unit, real_km2 };
  BAreaMode b_area_mode = BAreaMode::unit;

  double b_area(const geo::Region& receptor) const {
    return b_area_mode == BAreaMode::unit ? 1.0 : receptor.area_km2();
  }
};

/// Importance-sampling estimate of the integrated connectivity from receptor
/// B to source A: (sum psi / count) * |T| * |B| over the window's segments
/// whose receptor resolves to B (explicit receptor_region, else origin-in-B).
/// The sum is order-canonical (value-sorted compensated summation).
/// Throws NoSamples when no segment selects.
double estimate_integrated(const traj::TrajectoryCorpus& window,
                           const geo::Region& receptor, const geo::Region& source,
                           const PointwiseMeasure& measure,
                           const EstimatorConfig& cfg);

}  // namespace aeronet::conn

#endif
