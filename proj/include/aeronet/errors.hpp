#ifndef AERONET_ERRORS_HPP
#define AERONET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aeronet {

/// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad configuration, bad arguments, invalid partition files.
/// The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

/// Data that parses but violates the format's contracts.
/// The CLI maps these to exit code 3.
struct DataError : Error {
  using Error::Error;
};

// -- geometry ---------------------------------------------------------------

struct DegenerateSegment : DataError {
  using DataError::DataError;
};
struct CoincidentPoints : DataError {
  using DataError::DataError;
};
struct SamplingStalled : DataError {
  using DataError::DataError;
};
struct OverlappingRegions : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidRegion : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidPartition : ValidationError {
  using ValidationError::ValidationError;
};

// -- trajectory -------------------------------------------------------------

struct MalformedRow : DataError {
  MalformedRow(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};
struct NonMonotoneTime : DataError {
  explicit NonMonotoneTime(const std::string& traj_id)
      : DataError("non-monotone point_time in trajectory '" + traj_id + "'"),
        traj_id(traj_id) {}
  std::string traj_id;
};
struct MixedDeltaSign : DataError {
  using DataError::DataError;
};
struct EmptyCorpus : DataError {
  using DataError::DataError;
};
struct InvalidSegment : DataError {
  using DataError::DataError;
};

// -- flowsim ----------------------------------------------------------------

struct BlowUp : DataError {
  using DataError::DataError;
};

// -- connectivity -----------------------------------------------------------

struct MissingJacobian : DataError {
  using DataError::DataError;
};
struct MissingCovariate : DataError {
  using DataError::DataError;
};
struct NoSamples : DataError {
  using DataError::DataError;
};

// -- network ----------------------------------------------------------------

struct UnresolvedReceptor : DataError {
  explicit UnresolvedReceptor(const std::string& traj_id)
      : DataError("receptor of trajectory '" + traj_id +
                  "' cannot be resolved to a partition region"),
        traj_id(traj_id) {}
  std::string traj_id;
};
struct FormatVersionMismatch : DataError {
  using DataError::DataError;
};

// -- metrics ----------------------------------------------------------------

struct TooFewNodes : DataError {
  using DataError::DataError;
};
struct NoEdges : DataError {
  using DataError::DataError;
};
struct NoTriplets : DataError {
  using DataError::DataError;
};
struct InsufficientDegrees : DataError {
  using DataError::DataError;
};
struct ZeroVariance : DataError {
  using DataError::DataError;
};
struct IncompleteVectors : DataError {
  using DataError::DataError;
};
struct TooFewEdges : DataError {
  using DataError::DataError;
};
struct DegenerateNullModel : DataError {
  using DataError::DataError;
};

}  // namespace aeronet

#endif
