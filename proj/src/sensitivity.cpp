#include "snls/sensitivity.hpp"

#include <cmath>

#include "snls/errors.hpp"
#include "snls/geometry.hpp"
#include "snls/parallel.hpp"

namespace snls {

PathLinearization linearize_path(const Trajectory& traj, const ControlPath& control,
                                 const ControlSetup& setup) {
  const int n = setup.graph.n_nodes();
  const int steps = setup.n_steps();
  if (traj.n_steps() != steps) fail(ErrorKind::kShapeMismatch, "trajectory length differs from setup");
  ControlInputs inputs;
  if (control.kind == ControlKind::kPotential) {
    inputs.V = &control.values;
  } else {
    inputs.sigma = &control.values;
  }
  const bool additive = has_additive_noise(setup.params);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  PathLinearization lin(steps);
  for (int k = 0; k < steps; ++k) {
    const ModelParams p = params_at_step(setup.params, inputs, k);
    MadelungState mid = traj.states[k];
    mid.rho = 0.5 * (traj.states[k].rho + traj.states[k + 1].rho);
    mid.s = 0.5 * (traj.states[k].s + traj.states[k + 1].s);
    const double xi = clip_increment(traj.noise.increments[k], setup.dt(), setup.cfg.increment_clip);
    Eigen::MatrixXd m = field_jacobian(mid, setup.graph, p, Which::kH0) * setup.dt();
    if (!additive) m += field_jacobian(mid, setup.graph, p, Which::kH1) * xi;
    // Controls enter the S equation as -V dt or -eta_3 sigma dW.
    Eigen::MatrixXd forcing = Eigen::MatrixXd::Zero(2 * n, n);
    const double scale = control.kind == ControlKind::kPotential
                             ? -coefficients(p, Which::kH0).potential * setup.dt()
                             : -coefficients(p, Which::kH1).noise * xi;
    for (int i = 0; i < n; ++i) forcing(n + i, i) = scale;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lhs(eye - 0.5 * m);
    lin[k].R = lhs.solve(eye + 0.5 * m);
    lin[k].r = lhs.solve(forcing);
  }
  return lin;
}

LinearizedEnsemble linearize(const ControlPath& control, const ControlSetup& setup) {
  LinearizedEnsemble out;
  out.forward = simulate_controlled(control, setup);
  out.steps.resize(out.forward.paths.size());
  parallel_for(setup.n_paths(), setup.parallelism, [&](int k) {
    out.steps[k] = linearize_path(out.forward.paths[k], out.forward.control, setup);
  });
  return out;
}

SensitivitySolution sensitivity_solve(const Trajectory& traj, const PathLinearization& lin,
                                      const Eigen::MatrixXd& direction) {
  const int steps = static_cast<int>(lin.size());
  const int n = traj.states.front().n_nodes();
  if (direction.rows() != n || direction.cols() != steps) {
    fail(ErrorKind::kShapeMismatch, "direction must be N x n_steps");
  }
  SensitivitySolution sol;
  sol.xi.reserve(steps + 1);
  sol.x.reserve(steps + 1);
  sol.xi.push_back(Eigen::VectorXd::Zero(2 * n));
  for (int k = 0; k < steps; ++k) {
    sol.xi.push_back(lin[k].R * sol.xi.back() + lin[k].r * direction.col(k));
  }
  for (int k = 0; k <= steps; ++k) {
    const auto& st = traj.states[k];
    const ComplexState u = madelung_to_complex(st);
    ComplexState x(n);
    for (int j = 0; j < n; ++j) {
      x[j] = u[j] * std::complex<double>(sol.xi[k][j] / (2.0 * st.rho[j]), sol.xi[k][n + j]);
    }
    sol.x.push_back(std::move(x));
  }
  return sol;
}

SensitivitySolution sensitivity_solve(const ControlPath& control, const Eigen::MatrixXd& direction,
                                      const Trajectory& traj, const ControlSetup& setup) {
  return sensitivity_solve(traj, linearize_path(traj, control, setup), direction);
}

Eigen::VectorXd madelung_gradient(const MadelungState& st, const ComplexState& c) {
  const int n = st.n_nodes();
  Eigen::VectorXd flat(2 * n);
  for (int j = 0; j < n; ++j) {
    flat[j] = c[j].real();
    flat[n + j] = c[j].imag();
  }
  return madelung_tangent_map(st).transpose() * flat;
}

namespace {

// Per-path real gradients of the state cost terms: running (at levels
// 0..N-1, already multiplied by dt) and terminal.
struct StateCostGradients {
  std::vector<Eigen::VectorXd> running;
  Eigen::VectorXd terminal;
};

StateCostGradients state_gradients(const Trajectory& tr, int path, const CostFunctional& cost,
                                   const ControlSetup& setup) {
  const int steps = setup.n_steps();
  StateCostGradients g;
  g.running.resize(steps);
  for (int k = 0; k < steps; ++k) {
    const ComplexState u = madelung_to_complex(tr.states[k]);
    g.running[k] = setup.dt() * madelung_gradient(tr.states[k], cost.running_state_grad(k, path, u));
  }
  g.terminal = madelung_gradient(tr.states[steps],
                                 cost.terminal_grad(path, madelung_to_complex(tr.states[steps])));
  return g;
}

}  // namespace

double directional_derivative(const LinearizedEnsemble& lin, const Eigen::MatrixXd& direction,
                              const CostFunctional& cost, const ControlSetup& setup) {
  const int m = static_cast<int>(lin.forward.paths.size());
  const int steps = setup.n_steps();
  std::vector<double> per_path(m, 0.0);
  parallel_for(m, setup.parallelism, [&](int k) {
    const auto& tr = lin.forward.paths[k];
    const SensitivitySolution sol = sensitivity_solve(tr, lin.steps[k], direction);
    const StateCostGradients g = state_gradients(tr, k, cost, setup);
    double d = g.terminal.dot(sol.xi[steps]);
    for (int n = 0; n < steps; ++n) d += g.running[n].dot(sol.xi[n]);
    per_path[k] = d;
  });
  double sum = 0.0;
  for (double v : per_path) sum += v;
  double out = sum / m;
  for (int n = 0; n < steps; ++n) {
    out += setup.dt() * cost.running_control_grad(n, lin.forward.control.values.col(n)).dot(direction.col(n));
  }
  return out;
}

Eigen::MatrixXd gradient_sensitivity(const LinearizedEnsemble& lin, const CostFunctional& cost,
                                     const ControlSetup& setup) {
  const int m = static_cast<int>(lin.forward.paths.size());
  const int steps = setup.n_steps();
  const int n = setup.graph.n_nodes();
  const int dims = n * steps;
  std::vector<Eigen::VectorXd> per_path(m);
  parallel_for(m, setup.parallelism, [&](int k) {
    const auto& tr = lin.forward.paths[k];
    const StateCostGradients g = state_gradients(tr, k, cost, setup);
    // Tangents for all unit directions at once: column c = (node i, step q).
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(2 * n, dims);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dims);
    for (int q = 0; q < steps; ++q) {
      acc.noalias() += xi.transpose() * g.running[q];
      xi = lin.steps[k][q].R * xi;
      xi.middleCols(q * n, n) += lin.steps[k][q].r;
    }
    acc.noalias() += xi.transpose() * g.terminal;
    per_path[k] = std::move(acc);
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dims);
  for (const auto& v : per_path) sum += v;
  sum /= m;
  Eigen::MatrixXd grad(n, steps);
  for (int q = 0; q < steps; ++q) {
    grad.col(q) = sum.segment(q * n, n) / setup.dt() +
                  cost.running_control_grad(q, lin.forward.control.values.col(q));
  }
  return grad;
}

double directional_derivative_fd(const ControlPath& control, const Eigen::MatrixXd& direction,
                                 const CostFunctional& cost, const ControlSetup& setup,
                                 double eps) {
  ControlPath plus = control;
  ControlPath minus = control;
  plus.values += eps * direction;
  minus.values -= eps * direction;
  return (evaluate_cost(plus, cost, setup).j - evaluate_cost(minus, cost, setup).j) / (2.0 * eps);
}

Eigen::MatrixXd gradient_fd(const ControlPath& control, const CostFunctional& cost,
                            const ControlSetup& setup, double eps) {
  const int n = static_cast<int>(control.values.rows());
  const int steps = static_cast<int>(control.values.cols());
  Eigen::MatrixXd grad(n, steps);
  for (int q = 0; q < steps; ++q) {
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, steps);
      e(i, q) = 1.0;
      grad(i, q) = directional_derivative_fd(control, e, cost, setup, eps) / setup.dt();
    }
  }
  return grad;
}

}  // namespace snls
