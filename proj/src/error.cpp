#include "gfdyn/error.hpp"

namespace gfdyn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BranchLost: return "BranchLost";
    case ErrorKind::SingularValueOnPath: return "SingularValueOnPath";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NotParabolic: return "NotParabolic";
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
    case ErrorKind::InequalityViolated: return "InequalityViolated";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::OrbitLeftSector: return "OrbitLeftSector";
    case ErrorKind::UnsupportedMap: return "UnsupportedMap";
    case ErrorKind::AtParabolic: return "AtParabolic";
    case ErrorKind::OutsideComparisonRegion: return "OutsideComparisonRegion";
    case ErrorKind::OutsideMetricDomain: return "OutsideMetricDomain";
    case ErrorKind::UnboundedPostsingular: return "UnboundedPostsingular";
    case ErrorKind::MarginTooSmall: return "MarginTooSmall";
    case ErrorKind::DepthInsufficient: return "DepthInsufficient";
    case ErrorKind::NonAdmissible: return "NonAdmissible";
    case ErrorKind::OrbitHitsPartitionBoundary: return "OrbitHitsPartitionBoundary";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace gfdyn
