#ifndef AERONET_TRAJECTORY_HPP
#define AERONET_TRAJECTORY_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeronet/geometry.hpp"

namespace aeronet::traj {

struct Fix {
  std::int64_t t = 0;  ///< Unix seconds UTC
  geo::GeoPoint p;
};

/// One particle's time-stamped path. sample_time is the time the particle was
/// at `origin`; it must equal the first (forward) or last (backward) fix time.
struct TrajectorySegment {
  std::string traj_id;
  std::int64_t sample_time = 0;
  geo::GeoPoint origin;
  std::optional<std::string> receptor_region;
  std::vector<Fix> fixes;  ///< strictly increasing point_time
  /// covariate columns, each aligned with `fixes`
  std::map<std::string, std::vector<double>> covariates;
  /// true when the segment spans less than the corpus lag (kept, flagged)
  bool truncated = false;

  bool backward() const { return fixes.size() > 1 && sample_time == fixes.back().t; }

  /// Signed lag of this segment: (far end time) - sample_time.
  std::int64_t delta_seconds() const;

  /// Fixes as (seconds, point) pairs for the geometry kernel.
  std::vector<geo::TimedPoint> timed_points() const;

  /// Enforces the segment invariants; throws InvalidSegment.
  void validate() const;
};

struct TrajectoryCorpus {
  std::vector<TrajectorySegment> segments;
  std::int64_t delta_seconds = 0;  ///< signed lag, negative = backward
  std::int64_t time_min = 0;       ///< sample_time extent
  std::int64_t time_max = 0;
  std::vector<std::string> covariate_names;  ///< sorted union
};

/// Validates segments, derives the corpus lag (largest |segment lag|, uniform
/// sign required), flags truncated segments, and computes the time extent.
TrajectoryCorpus make_corpus(std::vector<TrajectorySegment> segments);

/// TrajCsvV1 reader. Leading '#' comment lines are tolerated before the
/// mandatory header. Throws MalformedRow / NonMonotoneTime / MixedDeltaSign /
/// EmptyCorpus.
TrajectoryCorpus parse_corpus(const std::filesystem::path& path);
TrajectoryCorpus parse_corpus(std::istream& in);

/// TrajCsvV1 writer; numbers use shortest round-trip decimals so that
/// parse(write(c)) reproduces every field exactly.
void write_corpus(const TrajectoryCorpus& corpus, const std::filesystem::path& path,
                  std::string_view config_fingerprint = {});
void write_corpus(const TrajectoryCorpus& corpus, std::ostream& out,
                  std::string_view config_fingerprint = {});

enum class WindowContext { whole, yearly, monthly_pooled };

/// Parses "whole" | "yearly" | "monthly-pooled".
WindowContext parse_context(std::string_view text);
std::string_view context_name(WindowContext context);

/// Splits a corpus by sample_time (UTC calendar): one "all" window, windows
/// keyed by year, or calendar months pooled across years keyed "01".."12".
std::map<std::string, TrajectoryCorpus> window_corpus(const TrajectoryCorpus& corpus,
                                                      WindowContext context);

/// HYSPLIT tdump to TrajCsvV1 field mapping. Diagnostic variables become
/// covariate columns; two-digit years below 70 map to 2000+.
TrajectoryCorpus parse_tdump(const std::filesystem::path& path);

}  // namespace aeronet::traj

#endif
