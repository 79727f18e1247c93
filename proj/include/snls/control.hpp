#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "snls/graph.hpp"
#include "snls/integrator.hpp"
#include "snls/model.hpp"
#include "snls/state.hpp"

namespace snls {

enum class ControlKind { kPotential, kDiffusion };

// Deterministic control, piecewise constant: column n acts on [t_n, t_{n+1}).
struct ControlPath {
  ControlKind kind = ControlKind::kPotential;
  Eigen::MatrixXd values;  // N x n_steps
};

// Everything held fixed during one optimization run (common random numbers).
struct ControlSetup {
  Graph graph;
  ModelParams params;
  MadelungState init;
  IntegratorConfig cfg;
  std::vector<std::uint64_t> seeds;
  int parallelism = 1;

  double dt() const noexcept { return cfg.dt; }
  int n_steps() const noexcept { return cfg.n_steps; }
  int n_paths() const noexcept { return static_cast<int>(seeds.size()); }
};

// Componentwise clamp to [-alpha, alpha].
ControlPath project_admissible(const ControlPath& control, double alpha);

// min over the box of <G, v - v*>, i.e. sum_{i,n} dt min(G (-alpha - v), G (alpha - v)).
double stationarity_residual(const ControlPath& control, const Eigen::MatrixXd& gradient,
                             double alpha, double dt);

// Cost integrands. Gradients with respect to a complex argument are returned
// as dRe + i dIm; the running terms are integrated with the left-endpoint rule.
class CostFunctional {
 public:
  virtual ~CostFunctional() = default;
  virtual double running_state(int n, int path, const ComplexState& u) const = 0;
  virtual ComplexState running_state_grad(int n, int path, const ComplexState& u) const = 0;
  virtual double running_control(int n, const Eigen::VectorXd& v) const = 0;
  virtual Eigen::VectorXd running_control_grad(int n, const Eigen::VectorXd& v) const = 0;
  virtual double terminal(int path, const ComplexState& u) const = 0;
  virtual ComplexState terminal_grad(int path, const ComplexState& u) const = 0;
};

struct CostSpec {
  double gamma = 0.0;
  double beta1 = 0.0;
  double beta = 0.0;
  ComplexState f1;                     // deterministic terminal target
  std::vector<ComplexState> f1_paths;  // per-path target; overrides f1 when non-empty
  Eigen::MatrixXd z;                   // control reference, N x n_steps
  Eigen::MatrixXcd z1;                 // state reference, N x n_steps (empty = 0)
  double alpha = 1.0;
};

// gamma |u(T) - f1|^2 + beta1 int |u - Z1|^2 + beta int |v - Z|^2.
class QuadraticCost final : public CostFunctional {
 public:
  explicit QuadraticCost(CostSpec spec);
  const CostSpec& spec() const noexcept { return spec_; }

  double running_state(int n, int path, const ComplexState& u) const override;
  ComplexState running_state_grad(int n, int path, const ComplexState& u) const override;
  double running_control(int n, const Eigen::VectorXd& v) const override;
  Eigen::VectorXd running_control_grad(int n, const Eigen::VectorXd& v) const override;
  double terminal(int path, const ComplexState& u) const override;
  ComplexState terminal_grad(int path, const ComplexState& u) const override;

 private:
  const ComplexState& target(int path) const;
  CostSpec spec_;
};

struct CostBreakdown {
  double j = 0.0;
  double terminal = 0.0;
  double running_state = 0.0;
  double running_control = 0.0;
};

struct ForwardEnsemble {
  ControlPath control;
  std::vector<Trajectory> paths;
};

// Simulates every seed under the control. Any failed path raises PathFailure:
// the cost is undefined there.
ForwardEnsemble simulate_controlled(const ControlPath& control, const ControlSetup& setup);

CostBreakdown cost_from_forward(const ForwardEnsemble& fwd, const CostFunctional& cost,
                                const ControlSetup& setup);
CostBreakdown evaluate_cost(const ControlPath& control, const CostFunctional& cost,
                            const ControlSetup& setup);

// Terminal states u(T) of the ensemble driven by `hidden`, one per seed, and
// their mean.
std::vector<ComplexState> terminal_states(const ControlPath& hidden, const ControlSetup& setup);
ComplexState mean_state(const std::vector<ComplexState>& states);

void validate(const ControlPath& control, const ControlSetup& setup);

}  // namespace snls
