#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snls/errors.hpp"
#include "snls/graph.hpp"
#include "snls/model.hpp"
#include "snls/noise.hpp"
#include "snls/state.hpp"

namespace snls {

struct IntegratorConfig {
  double dt = 1e-3;
  int n_steps = 1000;
  double fixedpoint_tol = 1e-12;
  int fixedpoint_maxiter = 50;
  double increment_clip = 6.0;
  double density_floor = 1e-12;
};

void validate(const IntegratorConfig& cfg);

// Optional piecewise-constant controls. Column n (N entries) replaces V or
// sigma on [t_n, t_{n+1}).
struct ControlInputs {
  const Eigen::MatrixXd* V = nullptr;
  const Eigen::MatrixXd* sigma = nullptr;
};

// Parameters in force during step n.
ModelParams params_at_step(const ModelParams& params, const ControlInputs& inputs, int n);

struct StepReport {
  int iterations = 0;
  double residual = 0.0;
  double increment = 0.0;  // clipped dW actually used
};

// One implicit-midpoint step y' = y + f0(ybar) dt + f1(ybar) clip(dW), solved
// by fixed-point iteration on y' - y starting from y' = y.
// Throws FixedPointDiverged or DensityFloorHit.
MadelungState step_midpoint(const MadelungState& state, const Graph& g, const ModelParams& params,
                            double dw, const IntegratorConfig& cfg, StepReport* report = nullptr);

struct StepDiagnostics {
  double mass_residual = 0.0;
  double h0 = 0.0;
  double min_density = 0.0;
};

struct Trajectory {
  std::vector<MadelungState> states;
  NoisePath noise;
  std::vector<double> w;  // cumulative clipped increments, w[0] = 0
  std::vector<StepDiagnostics> diagnostics;
  std::optional<ErrorKind> failure;
  std::string failure_message;

  bool ok() const noexcept { return !failure.has_value(); }
  int n_steps() const noexcept { return static_cast<int>(states.size()) - 1; }
};

// Integrates cfg.n_steps steps. Step failures end the path early; the partial
// trajectory is returned with `failure` set.
Trajectory integrate_path(const MadelungState& init, const Graph& g, const ModelParams& params,
                          const NoisePath& noise, const IntegratorConfig& cfg,
                          const ControlInputs& inputs = {});

}  // namespace snls
