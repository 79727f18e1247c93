#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snls/bsde.hpp"
#include "snls/control.hpp"

namespace snls {

enum class GradientSource { kFd, kSensitivity, kBsde };

std::string to_string(GradientSource s);
GradientSource parse_gradient_source(const std::string& name);

// Gradient density of the SAA objective at `control` (N x n_steps).
Eigen::MatrixXd compute_gradient(GradientSource source, const ControlPath& control,
                                 const CostFunctional& cost, const ControlSetup& setup,
                                 const BsdeOptions& bsde = {}, double fd_eps = 1e-4);

struct PgdOptions {
  double alpha = 1.0;
  double step0 = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  int max_halvings = 30;
  int max_iters = 200;
  double tol = 1e-6;  // on the projected-gradient norm
  // Barzilai-Borwein trial step (safeguarded to [1e-3, 1e3] step0) after the
  // first iteration; otherwise every line search starts from step0.
  bool barzilai_borwein = true;
  GradientSource source = GradientSource::kSensitivity;
  BsdeOptions bsde;
  double fd_eps = 1e-4;
};

struct PgdIteration {
  int iter = 0;
  double j = 0.0;
  double grad_norm = 0.0;    // sqrt(dt sum G^2)
  double step = 0.0;         // accepted step, 0 on the final row
  double stationarity = 0.0;
};

struct PgdResult {
  ControlPath control;
  std::vector<PgdIteration> history;
  bool converged = false;  // projected-gradient norm below tol
};

// L2(dt) norm of P(v - G) - v.
double projected_gradient_norm(const ControlPath& control, const Eigen::MatrixXd& gradient,
                               double alpha, double dt);

// Projected gradient descent with Armijo backtracking on the common-seed
// objective. LineSearchFailed after max_halvings without sufficient decrease.
PgdResult optimize_pgd(const CostFunctional& cost, const ControlPath& init,
                       const ControlSetup& setup, const PgdOptions& opts);

struct StrongConvergence {
  std::vector<int> n;
  std::vector<double> error;  // E sup_t sum_j |u^{V + d/n}_j - u^V_j|^2
  double slope = 0.0;         // least-squares slope of log error against log n
};

StrongConvergence strong_convergence(const ControlPath& control, const Eigen::MatrixXd& direction,
                                     const std::vector<int>& n, const ControlSetup& setup);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace snls
