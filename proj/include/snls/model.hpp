#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

namespace snls {

enum class ThetaKind { kAveraged, kLogarithmic, kHarmonic };
enum class Preset { kSnls1, kSnls2, kCustom };

const char* to_string(ThetaKind kind) noexcept;
const char* to_string(Preset preset) noexcept;
ThetaKind parse_theta_kind(const std::string& name);
Preset parse_preset(const std::string& name);

// Potentials, noise strength and the H1 mixing weights eta_1..eta_5 that act on
// (K, I, Sigma, W, L). The preset decides how H0 is assembled: snls2 drops the
// kinetic and Fisher parts from H0 (they live in H1 instead).
struct ModelParams {
  Eigen::VectorXd V;
  Eigen::MatrixXd W;
  Eigen::VectorXd sigma;
  double kappa = 0.0;
  std::array<double, 5> eta{0.0, 0.0, 1.0, 0.0, 0.0};
  ThetaKind theta_kind = ThetaKind::kAveraged;
  ThetaKind theta_tilde_kind = ThetaKind::kLogarithmic;
  Preset preset = Preset::kSnls1;

  int n_nodes() const noexcept { return static_cast<int>(V.size()); }
};

// Zero potentials and noise on n nodes.
ModelParams snls1_params(int n);
ModelParams snls2_params(int n);

// Throws ShapeMismatch / InvalidArgument (W not symmetric, non-finite values).
void validate(const ModelParams& params, int n_nodes);

// True when sigma_i is the same for every node.
bool has_uniform_sigma(const ModelParams& params);

// Coefficients of a Hamiltonian of the form
//   cK K + cI I + cV V + cW W + cL L + cSigma Sigma.
struct HamiltonianCoeffs {
  double kinetic = 0.0;
  double fisher = 0.0;
  double potential = 0.0;
  double interaction = 0.0;
  double entropy = 0.0;
  double noise = 0.0;
};

enum class Which { kH0, kH1 };

HamiltonianCoeffs coefficients(const ModelParams& params, Which which);

// H1 field does not depend on the state (pure additive noise in S).
bool has_additive_noise(const ModelParams& params);

}  // namespace snls
