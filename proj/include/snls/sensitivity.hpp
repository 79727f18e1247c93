#pragma once

#include <vector>

#include <Eigen/Dense>

#include "snls/control.hpp"

namespace snls {

// Exact tangent of one midpoint step: xi_{n+1} = R xi_n + r dv_n, where
// (I - M/2) R = I + M/2, (I - M/2) r = F and M = A0 dt + A1 dW at the step
// midpoint. Vectors are in (rho, S) ordering.
struct StepLinearization {
  Eigen::MatrixXd R;  // 2N x 2N
  Eigen::MatrixXd r;  // 2N x N, per unit change of each control component
};

using PathLinearization = std::vector<StepLinearization>;

PathLinearization linearize_path(const Trajectory& traj, const ControlPath& control,
                                 const ControlSetup& setup);

struct LinearizedEnsemble {
  ForwardEnsemble forward;
  std::vector<PathLinearization> steps;
};

LinearizedEnsemble linearize(const ControlPath& control, const ControlSetup& setup);

struct SensitivitySolution {
  std::vector<Eigen::VectorXd> xi;  // (d rho, d S) per time level
  std::vector<ComplexState> x;      // u (d rho / (2 rho) + i d S)
};

// Variational solution along one stored path, X(0) = 0.
SensitivitySolution sensitivity_solve(const Trajectory& traj, const PathLinearization& lin,
                                      const Eigen::MatrixXd& direction);
SensitivitySolution sensitivity_solve(const ControlPath& control, const Eigen::MatrixXd& direction,
                                      const Trajectory& traj, const ControlSetup& setup);

// Real gradient of a cost integrand in (rho, S) coordinates from its complex
// gradient c = dRe + i dIm.
Eigen::VectorXd madelung_gradient(const MadelungState& state, const ComplexState& c);

// dJ[direction] from the sensitivity equations, averaged over the ensemble.
double directional_derivative(const LinearizedEnsemble& lin, const Eigen::MatrixXd& direction,
                              const CostFunctional& cost, const ControlSetup& setup);

// Gradient density G (N x n_steps) with dJ[d] = sum_{i,n} dt G_in d_in.
Eigen::MatrixXd gradient_sensitivity(const LinearizedEnsemble& lin, const CostFunctional& cost,
                                     const ControlSetup& setup);

// Central differences of evaluate_cost on the same seeds.
double directional_derivative_fd(const ControlPath& control, const Eigen::MatrixXd& direction,
                                 const CostFunctional& cost, const ControlSetup& setup,
                                 double eps);
Eigen::MatrixXd gradient_fd(const ControlPath& control, const CostFunctional& cost,
                            const ControlSetup& setup, double eps);

}  // namespace snls
