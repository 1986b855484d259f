#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gfdyn {

using cplx = std::complex<double>;

enum class ErrorKind {
  BranchLost,
  SingularValueOnPath,
  Overflow,
  NotParabolic,
  DegenerateSeries,
  InequalityViolated,
  OutOfChart,
  NoConvergence,
  BoundViolated,
  OrbitLeftSector,
  UnsupportedMap,
  AtParabolic,
  OutsideComparisonRegion,
  OutsideMetricDomain,
  UnboundedPostsingular,
  MarginTooSmall,
  DepthInsufficient,
  NonAdmissible,
  OrbitHitsPartitionBoundary,
  PreconditionViolated,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Every failure carries its kind, and where it makes sense the offending
// point so callers can report a witness.
class DynamicsError : public std::runtime_error {
 public:
  DynamicsError(ErrorKind kind, const std::string& what,
                std::optional<cplx> witness = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        witness_(witness) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<cplx>& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::optional<cplx> witness_;
};

}  // namespace gfdyn
