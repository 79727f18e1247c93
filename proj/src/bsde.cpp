#include "snls/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "snls/errors.hpp"
#include "snls/geometry.hpp"
#include "snls/noise.hpp"
#include "snls/parallel.hpp"

namespace snls {

Eigen::VectorXd hermite_basis(double z, int degree) {
  Eigen::VectorXd h(degree + 1);
  h[0] = 1.0;
  if (degree >= 1) h[1] = z;
  for (int k = 2; k <= degree; ++k) h[k] = z * h[k - 1] - (k - 1) * h[k - 2];
  return h;
}

HermiteRegression::HermiteRegression(const Eigen::MatrixXd& features, double ridge,
                                     double max_condition, bool rank_revealing)
    : features_(features), rank_revealing_(rank_revealing) {
  const double m = static_cast<double>(features_.rows());
  Eigen::MatrixXd gram = features_.transpose() * features_ / m;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (rank_revealing_) {
    cod_.setThreshold(1e-10);
    cod_.compute(features_);
    return;
  }
  if (!(condition_ <= max_condition)) {
    fail(ErrorKind::kRegressionIllConditioned,
         "basis Gram matrix condition " + std::to_string(condition_) + " exceeds " +
             std::to_string(max_condition));
  }
  for (int k = 1; k < gram.rows(); ++k) gram(k, k) += ridge;
  gram_.compute(gram);
}

Eigen::MatrixXd HermiteRegression::project(const Eigen::MatrixXd& y) const {
  if (rank_revealing_) return features_ * cod_.solve(y);
  const double m = static_cast<double>(features_.rows());
  const Eigen::MatrixXd coef = gram_.solve(features_.transpose() * y / m);
  return features_ * coef;
}

void require_validated(const ControlPath& control, const ControlSetup& setup) {
  if (!has_additive_noise(setup.params)) {
    fail(ErrorKind::kUnsupportedModel, "validated BSDE needs additive noise (SNLS1 preset)");
  }
  if (control.kind == ControlKind::kPotential) {
    if (!has_uniform_sigma(setup.params)) {
      fail(ErrorKind::kNonConstantSigma, "validated BSDE needs a uniform sigma");
    }
  } else {
    const double v0 = control.values.size() > 0 ? control.values(0, 0) : 0.0;
    if ((control.values.array() != v0).any()) {
      fail(ErrorKind::kNonConstantSigma, "validated BSDE needs a constant diffusion control");
    }
  }
}

namespace {

Eigen::MatrixXd slice_features(const std::vector<Trajectory>& paths, int n, double t,
                               const BsdeOptions& opts) {
  const int m = static_cast<int>(paths.size());
  if (n == 0) return Eigen::MatrixXd::Ones(m, 1);
  const int nodes = paths.front().states[n].n_nodes();
  const int extra = opts.validated ? 0 : 2 * (nodes - 1);
  Eigen::MatrixXd x(m, opts.degree + 1 + extra);
  const double scale = 1.0 / std::sqrt(t);
  for (int k = 0; k < m; ++k) {
    x.row(k).head(opts.degree + 1) = hermite_basis(paths[k].w[n] * scale, opts.degree).transpose();
    if (extra > 0) {
      const auto& st = paths[k].states[n];
      for (int j = 0; j + 1 < nodes; ++j) x(k, opts.degree + 1 + j) = st.rho[j];
      for (int j = 1; j < nodes; ++j) x(k, opts.degree + nodes + j - 1) = st.s[j] - st.s[0];
    }
  }
  return x;
}

ComplexState to_complex_costate(const MadelungState& st, const Eigen::VectorXd& p) {
  const int n = st.n_nodes();
  const Eigen::VectorXd flat = -madelung_tangent_map(st).transpose().partialPivLu().solve(p);
  ComplexState y(n);
  for (int j = 0; j < n; ++j) y[j] = {flat[j], flat[n + j]};
  return y;
}

Eigen::VectorXd flatten(const ComplexState& c) {
  const int n = static_cast<int>(c.size());
  Eigen::VectorXd out(2 * n);
  out.head(n) = c.real();
  out.tail(n) = c.imag();
  return out;
}

}  // namespace

BsdeSolution bsde_solve(const LinearizedEnsemble& lin, const CostFunctional& cost,
                        const ControlSetup& setup, const BsdeOptions& opts) {
  if (opts.degree < 0) fail(ErrorKind::kInvalidArgument, "regression degree must be >= 0");
  if (opts.validated) require_validated(lin.forward.control, setup);
  const auto& paths = lin.forward.paths;
  const int m = static_cast<int>(paths.size());
  const int steps = setup.n_steps();
  const int n = setup.graph.n_nodes();
  const double dt = setup.dt();

  BsdeSolution sol;
  sol.p.assign(m, std::vector<Eigen::VectorXd>(steps + 1));
  sol.y.assign(m, std::vector<ComplexState>(steps + 1));
  sol.z.assign(m, std::vector<ComplexState>(steps));

  parallel_for(m, setup.parallelism, [&](int k) {
    const auto& st = paths[k].states[steps];
    const ComplexState h = cost.terminal_grad(k, madelung_to_complex(st));
    sol.p[k][steps] = madelung_gradient(st, h);
    sol.y[k][steps] = -h;
  });

  Eigen::MatrixXd carried(m, 2 * n);
  Eigen::MatrixXd next_y(m, 2 * n);
  for (int level = steps - 1; level >= 0; --level) {
    parallel_for(m, setup.parallelism, [&](int k) {
      carried.row(k) = (lin.steps[k][level].R.transpose() * sol.p[k][level + 1]).transpose();
      next_y.row(k) = flatten(sol.y[k][level + 1]).transpose();
    });
    const HermiteRegression reg(slice_features(paths, level, level * dt, opts), opts.ridge,
                                opts.max_condition, !opts.validated);
    sol.max_condition = std::max(sol.max_condition, reg.condition());
    const Eigen::MatrixXd cond_p = reg.project(carried);
    // Z = E[(Y_{n+1} - E_n Y_{n+1}) dW | F_n] / dt; centering removes the
    // sampling noise of E_n[dW] = 0.
    Eigen::MatrixXd zsamples = next_y - reg.project(next_y);
    for (int k = 0; k < m; ++k) {
      zsamples.row(k) *= clip_increment(paths[k].noise.increments[level], dt, setup.cfg.increment_clip);
    }
    const Eigen::MatrixXd cond_z = reg.project(zsamples) / dt;
    parallel_for(m, setup.parallelism, [&](int k) {
      const auto& st = paths[k].states[level];
      const ComplexState g = cost.running_state_grad(level, k, madelung_to_complex(st));
      sol.p[k][level] = cond_p.row(k).transpose() + dt * madelung_gradient(st, g);
      sol.y[k][level] = to_complex_costate(st, sol.p[k][level]);
      ComplexState z(n);
      for (int j = 0; j < n; ++j) z[j] = {cond_z(k, j), cond_z(k, n + j)};
      sol.z[k][level] = std::move(z);
    });
  }
  return sol;
}

Eigen::MatrixXd gradient_from_bsde(const BsdeSolution& bsde, const LinearizedEnsemble& lin,
                                   const CostFunctional& cost, const ControlSetup& setup) {
  const int m = static_cast<int>(lin.forward.paths.size());
  const int steps = setup.n_steps();
  const int n = setup.graph.n_nodes();
  std::vector<Eigen::MatrixXd> per_path(m);
  parallel_for(m, setup.parallelism, [&](int k) {
    Eigen::MatrixXd g(n, steps);
    for (int q = 0; q < steps; ++q) {
      g.col(q) = lin.steps[k][q].r.transpose() * bsde.p[k][q + 1];
    }
    per_path[k] = std::move(g);
  });
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, steps);
  for (const auto& g : per_path) sum += g;
  Eigen::MatrixXd grad = sum / (m * setup.dt());
  for (int q = 0; q < steps; ++q) {
    grad.col(q) += cost.running_control_grad(q, lin.forward.control.values.col(q));
  }
  return grad;
}

Eigen::MatrixXd gradient_from_bsde_continuous(const BsdeSolution& bsde, const LinearizedEnsemble& lin,
                                              const CostFunctional& cost, const ControlSetup& setup) {
  if (lin.forward.control.kind != ControlKind::kPotential) {
    fail(ErrorKind::kUnsupportedModel, "continuous pairing is implemented for potential control");
  }
  const int m = static_cast<int>(lin.forward.paths.size());
  const int steps = setup.n_steps();
  const int n = setup.graph.n_nodes();
  const double cv = coefficients(setup.params, Which::kH0).potential;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, steps);
  for (int k = 0; k < m; ++k) {
    for (int q = 0; q < steps; ++q) {
      const ComplexState u = madelung_to_complex(lin.forward.paths[k].states[q]);
      for (int i = 0; i < n; ++i) sum(i, q) += (std::conj(u[i]) * bsde.y[k][q][i]).imag();
    }
  }
  Eigen::MatrixXd grad = cv * sum / m;
  for (int q = 0; q < steps; ++q) {
    grad.col(q) += cost.running_control_grad(q, lin.forward.control.values.col(q));
  }
  return grad;
}

DualityCheck duality_check(const BsdeSolution& bsde, const LinearizedEnsemble& lin,
                           const Eigen::MatrixXd& direction, const CostFunctional& cost,
                           const ControlSetup& setup) {
  const int m = static_cast<int>(lin.forward.paths.size());
  const int steps = setup.n_steps();
  std::vector<double> lhs(m, 0.0);
  std::vector<double> rhs(m, 0.0);
  parallel_for(m, setup.parallelism, [&](int k) {
    const auto& tr = lin.forward.paths[k];
    const SensitivitySolution sens = sensitivity_solve(tr, lin.steps[k], direction);
    lhs[k] = (sens.x[steps].conjugate().cwiseProduct(bsde.y[k][steps])).sum().real();
    double r = 0.0;
    for (int q = 0; q < steps; ++q) {
      r -= bsde.p[k][q + 1].dot(lin.steps[k][q].r * direction.col(q));
      const ComplexState g = cost.running_state_grad(q, k, madelung_to_complex(tr.states[q]));
      r += setup.dt() * (g.conjugate().cwiseProduct(sens.x[q])).sum().real();
    }
    rhs[k] = r;
  });
  DualityCheck out;
  for (int k = 0; k < m; ++k) {
    out.lhs += lhs[k];
    out.rhs += rhs[k];
  }
  out.lhs /= m;
  out.rhs /= m;
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.rel_error = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  return out;
}

}  // namespace snls
