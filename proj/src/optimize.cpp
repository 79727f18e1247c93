#include "snls/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "snls/errors.hpp"
#include "snls/geometry.hpp"
#include "snls/sensitivity.hpp"

namespace snls {

std::string to_string(GradientSource s) {
  switch (s) {
    case GradientSource::kFd: return "fd";
    case GradientSource::kSensitivity: return "sensitivity";
    case GradientSource::kBsde: return "bsde";
  }
  return "?";
}

GradientSource parse_gradient_source(const std::string& name) {
  if (name == "fd") return GradientSource::kFd;
  if (name == "sensitivity") return GradientSource::kSensitivity;
  if (name == "bsde") return GradientSource::kBsde;
  fail(ErrorKind::kInvalidArgument, "unknown gradient source '" + name + "'");
}

Eigen::MatrixXd compute_gradient(GradientSource source, const ControlPath& control,
                                 const CostFunctional& cost, const ControlSetup& setup,
                                 const BsdeOptions& bsde, double fd_eps) {
  switch (source) {
    case GradientSource::kFd:
      return gradient_fd(control, cost, setup, fd_eps);
    case GradientSource::kSensitivity:
      return gradient_sensitivity(linearize(control, setup), cost, setup);
    case GradientSource::kBsde: {
      if (bsde.validated) require_validated(control, setup);
      const LinearizedEnsemble lin = linearize(control, setup);
      return gradient_from_bsde(bsde_solve(lin, cost, setup, bsde), lin, cost, setup);
    }
  }
  fail(ErrorKind::kInvalidArgument, "unknown gradient source");
}

double projected_gradient_norm(const ControlPath& control, const Eigen::MatrixXd& gradient,
                               double alpha, double dt) {
  const Eigen::MatrixXd moved =
      (control.values - gradient).cwiseMax(-alpha).cwiseMin(alpha) - control.values;
  return std::sqrt(dt * moved.squaredNorm());
}

PgdResult optimize_pgd(const CostFunctional& cost, const ControlPath& init,
                       const ControlSetup& setup, const PgdOptions& opts) {
  if (!(opts.alpha > 0.0) || !(opts.step0 > 0.0) || !(opts.backtrack > 0.0 && opts.backtrack < 1.0) ||
      opts.max_iters < 0 || opts.max_halvings < 0) {
    fail(ErrorKind::kInvalidArgument, "invalid PGD options");
  }
  const double dt = setup.dt();
  PgdResult res;
  res.control = project_admissible(init, opts.alpha);
  double j = evaluate_cost(res.control, cost, setup).j;
  Eigen::MatrixXd grad = compute_gradient(opts.source, res.control, cost, setup, opts.bsde, opts.fd_eps);
  Eigen::MatrixXd prev_values;
  Eigen::MatrixXd prev_grad;

  for (int it = 0;; ++it) {
    PgdIteration row;
    row.iter = it;
    row.j = j;
    row.grad_norm = std::sqrt(dt * grad.squaredNorm());
    row.stationarity = stationarity_residual(res.control, grad, opts.alpha, dt);
    if (projected_gradient_norm(res.control, grad, opts.alpha, dt) < opts.tol) {
      res.converged = true;
      res.history.push_back(row);
      break;
    }
    if (it >= opts.max_iters) {
      res.history.push_back(row);
      break;
    }

    double eta = opts.step0;
    if (opts.barzilai_borwein && prev_values.size() > 0) {
      const Eigen::MatrixXd s = res.control.values - prev_values;
      const Eigen::MatrixXd y = grad - prev_grad;
      const double sy = (s.array() * y.array()).sum();
      if (sy > 0.0) {
        eta = std::clamp(s.squaredNorm() / sy, 1e-3 * opts.step0, 1e3 * opts.step0);
      }
    }

    ControlPath trial;
    double j_trial = 0.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      trial = res.control;
      trial.values = (res.control.values - eta * grad).cwiseMax(-opts.alpha).cwiseMin(opts.alpha);
      const double slope = dt * (grad.array() * (trial.values - res.control.values).array()).sum();
      j_trial = evaluate_cost(trial, cost, setup).j;
      if (j_trial <= j + opts.armijo * slope && j_trial <= j) {
        accepted = true;
        break;
      }
      eta *= opts.backtrack;
    }
    if (!accepted) {
      fail(ErrorKind::kLineSearchFailed, "no sufficient decrease after " +
                                             std::to_string(opts.max_halvings) +
                                             " halvings at iteration " + std::to_string(it));
    }
    row.step = eta;
    res.history.push_back(row);

    prev_values = res.control.values;
    prev_grad = grad;
    res.control = std::move(trial);
    j = j_trial;
    grad = compute_gradient(opts.source, res.control, cost, setup, opts.bsde, opts.fd_eps);
  }
  return res;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::kInvalidArgument, "slope fit needs >= 2 points");
  const int m = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int k = 0; k < m; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) fail(ErrorKind::kInvalidArgument, "slope fit needs positive data");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < m; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

StrongConvergence strong_convergence(const ControlPath& control, const Eigen::MatrixXd& direction,
                                     const std::vector<int>& n, const ControlSetup& setup) {
  const ForwardEnsemble base = simulate_controlled(control, setup);
  const int m = static_cast<int>(base.paths.size());
  StrongConvergence out;
  out.n = n;
  for (int k : n) {
    if (k <= 0) fail(ErrorKind::kInvalidArgument, "sequence index must be positive");
    ControlPath perturbed = control;
    perturbed.values += direction / static_cast<double>(k);
    const ForwardEnsemble fwd = simulate_controlled(perturbed, setup);
    double sum = 0.0;
    for (int p = 0; p < m; ++p) {
      double sup = 0.0;
      for (std::size_t q = 0; q < fwd.paths[p].states.size(); ++q) {
        const ComplexState diff = madelung_to_complex(fwd.paths[p].states[q]) -
                                  madelung_to_complex(base.paths[p].states[q]);
        sup = std::max(sup, diff.squaredNorm());
      }
      sum += sup;
    }
    out.error.push_back(sum / m);
  }
  std::vector<double> xs(n.begin(), n.end());
  out.slope = loglog_slope(xs, out.error);
  return out;
}

}  // namespace snls
