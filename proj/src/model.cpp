#include "snls/model.hpp"

#include <cmath>

#include "snls/errors.hpp"

namespace snls {

const char* to_string(ThetaKind kind) noexcept {
  switch (kind) {
    case ThetaKind::kAveraged: return "averaged";
    case ThetaKind::kLogarithmic: return "logarithmic";
    case ThetaKind::kHarmonic: return "harmonic";
  }
  return "unknown";
}

const char* to_string(Preset preset) noexcept {
  switch (preset) {
    case Preset::kSnls1: return "snls1";
    case Preset::kSnls2: return "snls2";
    case Preset::kCustom: return "custom";
  }
  return "unknown";
}

ThetaKind parse_theta_kind(const std::string& name) {
  if (name == "averaged") return ThetaKind::kAveraged;
  if (name == "logarithmic") return ThetaKind::kLogarithmic;
  if (name == "harmonic") return ThetaKind::kHarmonic;
  fail(ErrorKind::kInvalidArgument, "unknown theta kind '" + name + "'");
}

Preset parse_preset(const std::string& name) {
  if (name == "snls1") return Preset::kSnls1;
  if (name == "snls2") return Preset::kSnls2;
  if (name == "custom") return Preset::kCustom;
  fail(ErrorKind::kInvalidArgument, "unknown preset '" + name + "'");
}

ModelParams snls1_params(int n) {
  ModelParams p;
  p.V = Eigen::VectorXd::Zero(n);
  p.W = Eigen::MatrixXd::Zero(n, n);
  p.sigma = Eigen::VectorXd::Zero(n);
  p.eta = {0.0, 0.0, 1.0, 0.0, 0.0};
  p.preset = Preset::kSnls1;
  return p;
}

ModelParams snls2_params(int n) {
  ModelParams p = snls1_params(n);
  p.eta = {1.0, 0.125, 0.0, 0.0, 0.0};
  p.preset = Preset::kSnls2;
  return p;
}

void validate(const ModelParams& p, int n) {
  if (p.V.size() != n) fail(ErrorKind::kShapeMismatch, "V has wrong length");
  if (p.sigma.size() != n) fail(ErrorKind::kShapeMismatch, "sigma has wrong length");
  if (p.W.rows() != n || p.W.cols() != n) fail(ErrorKind::kShapeMismatch, "W must be N x N");
  if (!p.V.allFinite() || !p.W.allFinite() || !p.sigma.allFinite() || !std::isfinite(p.kappa)) {
    fail(ErrorKind::kInvalidArgument, "model parameters must be finite");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (p.W(i, j) != p.W(j, i)) fail(ErrorKind::kInvalidArgument, "W must be symmetric");
    }
  }
  for (double e : p.eta) {
    if (!std::isfinite(e)) fail(ErrorKind::kInvalidArgument, "eta must be finite");
  }
}

bool has_uniform_sigma(const ModelParams& p) {
  for (int i = 1; i < p.sigma.size(); ++i) {
    if (p.sigma[i] != p.sigma[0]) return false;
  }
  return true;
}

HamiltonianCoeffs coefficients(const ModelParams& p, Which which) {
  HamiltonianCoeffs c;
  if (which == Which::kH0) {
    const bool dispersive = p.preset != Preset::kSnls2;
    c.kinetic = dispersive ? 1.0 : 0.0;
    c.fisher = dispersive ? 0.125 : 0.0;
    c.potential = 1.0;
    c.interaction = 1.0;
    c.entropy = -p.kappa;
  } else {
    c.kinetic = p.eta[0];
    c.fisher = p.eta[1];
    c.noise = p.eta[2];
    c.interaction = p.eta[3];
    c.entropy = p.eta[4];
  }
  return c;
}

bool has_additive_noise(const ModelParams& p) {
  return p.eta[0] == 0.0 && p.eta[1] == 0.0 && p.eta[3] == 0.0 && p.eta[4] == 0.0;
}

}  // namespace snls
