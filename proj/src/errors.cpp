#include "snls/errors.hpp"

namespace snls {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::kSelfLoop: return "SelfLoop";
    case ErrorKind::kDuplicateEdge: return "DuplicateEdge";
    case ErrorKind::kNonpositiveWeight: return "NonpositiveWeight";
    case ErrorKind::kTooFewNodes: return "TooFewNodes";
    case ErrorKind::kNotALattice: return "NotALattice";
    case ErrorKind::kOutOfDomain: return "OutOfDomain";
    case ErrorKind::kBoundaryDensity: return "BoundaryDensity";
    case ErrorKind::kZeroAmplitude: return "ZeroAmplitude";
    case ErrorKind::kFixedPointDiverged: return "FixedPointDiverged";
    case ErrorKind::kDensityFloorHit: return "DensityFloorHit";
    case ErrorKind::kPathFailure: return "PathFailure";
    case ErrorKind::kNonConstantSigma: return "NonConstantSigma";
    case ErrorKind::kUnsupportedModel: return "UnsupportedModel";
    case ErrorKind::kRegressionIllConditioned: return "RegressionIllConditioned";
    case ErrorKind::kLineSearchFailed: return "LineSearchFailed";
    case ErrorKind::kConfig: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace snls
