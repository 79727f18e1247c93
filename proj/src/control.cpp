#include "snls/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snls/errors.hpp"
#include "snls/geometry.hpp"
#include "snls/parallel.hpp"

namespace snls {

ControlPath project_admissible(const ControlPath& control, double alpha) {
  ControlPath out = control;
  out.values = control.values.cwiseMax(-alpha).cwiseMin(alpha);
  return out;
}

double stationarity_residual(const ControlPath& control, const Eigen::MatrixXd& gradient,
                             double alpha, double dt) {
  if (gradient.rows() != control.values.rows() || gradient.cols() != control.values.cols()) {
    fail(ErrorKind::kShapeMismatch, "gradient and control shapes differ");
  }
  double sum = 0.0;
  for (int n = 0; n < gradient.cols(); ++n) {
    for (int i = 0; i < gradient.rows(); ++i) {
      const double g = gradient(i, n);
      const double v = control.values(i, n);
      sum += dt * std::min(g * (-alpha - v), g * (alpha - v));
    }
  }
  return sum;
}

QuadraticCost::QuadraticCost(CostSpec spec) : spec_(std::move(spec)) {
  if (spec_.gamma < 0.0 || spec_.beta1 < 0.0 || spec_.beta < 0.0) {
    fail(ErrorKind::kInvalidArgument, "cost weights must be nonnegative");
  }
}

const ComplexState& QuadraticCost::target(int path) const {
  if (!spec_.f1_paths.empty()) return spec_.f1_paths.at(path);
  return spec_.f1;
}

double QuadraticCost::running_state(int n, int, const ComplexState& u) const {
  if (spec_.beta1 == 0.0) return 0.0;
  if (spec_.z1.size() == 0) return spec_.beta1 * u.squaredNorm();
  return spec_.beta1 * (u - spec_.z1.col(n)).squaredNorm();
}

ComplexState QuadraticCost::running_state_grad(int n, int, const ComplexState& u) const {
  if (spec_.beta1 == 0.0) return ComplexState::Zero(u.size());
  if (spec_.z1.size() == 0) return 2.0 * spec_.beta1 * u;
  return 2.0 * spec_.beta1 * (u - spec_.z1.col(n));
}

double QuadraticCost::running_control(int n, const Eigen::VectorXd& v) const {
  if (spec_.beta == 0.0) return 0.0;
  if (spec_.z.size() == 0) return spec_.beta * v.squaredNorm();
  return spec_.beta * (v - spec_.z.col(n)).squaredNorm();
}

Eigen::VectorXd QuadraticCost::running_control_grad(int n, const Eigen::VectorXd& v) const {
  if (spec_.beta == 0.0) return Eigen::VectorXd::Zero(v.size());
  if (spec_.z.size() == 0) return 2.0 * spec_.beta * v;
  return 2.0 * spec_.beta * (v - spec_.z.col(n));
}

double QuadraticCost::terminal(int path, const ComplexState& u) const {
  if (spec_.gamma == 0.0) return 0.0;
  return spec_.gamma * (u - target(path)).squaredNorm();
}

ComplexState QuadraticCost::terminal_grad(int path, const ComplexState& u) const {
  if (spec_.gamma == 0.0) return ComplexState::Zero(u.size());
  return 2.0 * spec_.gamma * (u - target(path));
}

void validate(const ControlPath& control, const ControlSetup& setup) {
  if (control.values.rows() != setup.graph.n_nodes() || control.values.cols() != setup.n_steps()) {
    fail(ErrorKind::kShapeMismatch, "control must be N x n_steps");
  }
  if (!control.values.allFinite()) fail(ErrorKind::kInvalidArgument, "control is not finite");
  if (setup.seeds.empty()) fail(ErrorKind::kInvalidArgument, "control setup needs seeds");
}

ForwardEnsemble simulate_controlled(const ControlPath& control, const ControlSetup& setup) {
  validate(control, setup);
  ForwardEnsemble fwd;
  fwd.control = control;
  fwd.paths.resize(setup.n_paths());
  ControlInputs inputs;
  if (control.kind == ControlKind::kPotential) {
    inputs.V = &fwd.control.values;
  } else {
    inputs.sigma = &fwd.control.values;
  }
  parallel_for(setup.n_paths(), setup.parallelism, [&](int k) {
    const NoisePath noise = sample_brownian(setup.seeds[k], setup.dt(), setup.n_steps());
    fwd.paths[k] = integrate_path(setup.init, setup.graph, setup.params, noise, setup.cfg, inputs);
  });
  for (const auto& p : fwd.paths) {
    if (!p.ok()) {
      fail(ErrorKind::kPathFailure,
           "seed " + std::to_string(p.noise.seed) + " failed: " + p.failure_message);
    }
  }
  return fwd;
}

CostBreakdown cost_from_forward(const ForwardEnsemble& fwd, const CostFunctional& cost,
                                const ControlSetup& setup) {
  const int m = static_cast<int>(fwd.paths.size());
  const int steps = setup.n_steps();
  std::vector<double> term(m, 0.0);
  std::vector<double> run(m, 0.0);
  parallel_for(m, setup.parallelism, [&](int k) {
    const auto& tr = fwd.paths[k];
    double r = 0.0;
    for (int n = 0; n < steps; ++n) r += cost.running_state(n, k, madelung_to_complex(tr.states[n]));
    run[k] = r * setup.dt();
    term[k] = cost.terminal(k, madelung_to_complex(tr.states[steps]));
  });
  CostBreakdown out;
  for (int k = 0; k < m; ++k) {
    out.terminal += term[k];
    out.running_state += run[k];
  }
  out.terminal /= m;
  out.running_state /= m;
  for (int n = 0; n < steps; ++n) {
    out.running_control += setup.dt() * cost.running_control(n, fwd.control.values.col(n));
  }
  out.j = out.terminal + out.running_state + out.running_control;
  return out;
}

CostBreakdown evaluate_cost(const ControlPath& control, const CostFunctional& cost,
                            const ControlSetup& setup) {
  return cost_from_forward(simulate_controlled(control, setup), cost, setup);
}

std::vector<ComplexState> terminal_states(const ControlPath& hidden, const ControlSetup& setup) {
  const ForwardEnsemble fwd = simulate_controlled(hidden, setup);
  std::vector<ComplexState> out;
  out.reserve(fwd.paths.size());
  for (const auto& p : fwd.paths) out.push_back(madelung_to_complex(p.states.back()));
  return out;
}

ComplexState mean_state(const std::vector<ComplexState>& states) {
  if (states.empty()) fail(ErrorKind::kInvalidArgument, "no states to average");
  ComplexState sum = ComplexState::Zero(states.front().size());
  for (const auto& s : states) sum += s;
  return sum / static_cast<double>(states.size());
}

}  // namespace snls
