#pragma once

#include <stdexcept>
#include <string>

namespace snls {

enum class ErrorKind {
  kInvalidArgument,
  kShapeMismatch,
  kIndexOutOfRange,
  kDisconnectedGraph,
  kSelfLoop,
  kDuplicateEdge,
  kNonpositiveWeight,
  kTooFewNodes,
  kNotALattice,
  kOutOfDomain,
  kBoundaryDensity,
  kZeroAmplitude,
  kFixedPointDiverged,
  kDensityFloorHit,
  kPathFailure,
  kNonConstantSigma,
  kUnsupportedModel,
  kRegressionIllConditioned,
  kLineSearchFailed,
  kConfig,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-status mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace snls
