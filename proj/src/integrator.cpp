#include "snls/integrator.hpp"

#include <cmath>
#include <string>

#include "snls/geometry.hpp"

namespace snls {

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0)) fail(ErrorKind::kInvalidArgument, "dt must be positive");
  if (cfg.n_steps < 0) fail(ErrorKind::kInvalidArgument, "n_steps must be nonnegative");
  if (!(cfg.fixedpoint_tol > 0.0)) fail(ErrorKind::kInvalidArgument, "fixedpoint_tol must be positive");
  if (cfg.fixedpoint_maxiter < 1) fail(ErrorKind::kInvalidArgument, "fixedpoint_maxiter must be >= 1");
  if (!(cfg.increment_clip > 0.0)) fail(ErrorKind::kInvalidArgument, "increment_clip must be positive");
  if (!(cfg.density_floor > 0.0)) fail(ErrorKind::kInvalidArgument, "density_floor must be positive");
}

ModelParams params_at_step(const ModelParams& params, const ControlInputs& inputs, int n) {
  ModelParams p = params;
  if (inputs.V != nullptr) p.V = inputs.V->col(n);
  if (inputs.sigma != nullptr) p.sigma = inputs.sigma->col(n);
  return p;
}

namespace {

void check_floor(const Eigen::VectorXd& rho, double floor, const char* where) {
  for (int i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > floor)) {
      fail(ErrorKind::kDensityFloorHit,
           std::string(where) + ": rho[" + std::to_string(i) + "] = " + std::to_string(rho[i]));
    }
  }
}

}  // namespace

MadelungState step_midpoint(const MadelungState& y, const Graph& g, const ModelParams& params,
                            double dw, const IntegratorConfig& cfg, StepReport* report) {
  require_compatible(y, g);
  if (!std::isfinite(dw)) fail(ErrorKind::kInvalidArgument, "increment is not finite");
  const int n = g.n_nodes();
  const double xi = clip_increment(dw, cfg.dt, cfg.increment_clip);
  const HamiltonianCoeffs c0 = coefficients(params, Which::kH0);
  const HamiltonianCoeffs c1 = coefficients(params, Which::kH1);
  const bool additive = has_additive_noise(params);

  Eigen::VectorXd f0r, f0s, f1r, f1s;
  Eigen::VectorXd mid_r(n), mid_s(n);
  if (additive) eval_field(g, params, c1, y.rho, y.s, y.winding, f1r, f1s);

  Eigen::VectorXd dr = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ds = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd nr(n), ns(n);
  double residual = INFINITY;
  int it = 0;
  while (it < cfg.fixedpoint_maxiter) {
    ++it;
    mid_r = y.rho + 0.5 * dr;
    mid_s = y.s + 0.5 * ds;
    check_floor(mid_r, cfg.density_floor, "midpoint iterate");
    eval_field(g, params, c0, mid_r, mid_s, y.winding, f0r, f0s);
    if (!additive) eval_field(g, params, c1, mid_r, mid_s, y.winding, f1r, f1s);
    nr = f0r * cfg.dt + f1r * xi;
    ns = f0s * cfg.dt + f1s * xi;
    residual = std::max((nr - dr).lpNorm<Eigen::Infinity>(), (ns - ds).lpNorm<Eigen::Infinity>());
    dr.swap(nr);
    ds.swap(ns);
    if (!std::isfinite(residual)) break;
    if (residual <= cfg.fixedpoint_tol) break;
  }
  if (!(residual <= cfg.fixedpoint_tol)) {
    fail(ErrorKind::kFixedPointDiverged,
         "residual " + std::to_string(residual) + " after " + std::to_string(it) + " iterations");
  }
  MadelungState out;
  out.rho = y.rho + dr;
  out.s = y.s + ds;
  out.winding = y.winding;
  out.t = y.t + cfg.dt;
  check_floor(out.rho, cfg.density_floor, "step result");
  if (report != nullptr) {
    report->iterations = it;
    report->residual = residual;
    report->increment = xi;
  }
  return out;
}

namespace {

StepDiagnostics diagnose(const MadelungState& st, const Graph& g, const ModelParams& p) {
  StepDiagnostics d;
  d.mass_residual = st.rho.sum() - 1.0;
  d.h0 = hamiltonian(st, g, p, Which::kH0);
  d.min_density = st.rho.minCoeff();
  return d;
}

}  // namespace

Trajectory integrate_path(const MadelungState& init, const Graph& g, const ModelParams& params,
                          const NoisePath& noise, const IntegratorConfig& cfg,
                          const ControlInputs& inputs) {
  validate(cfg);
  require_compatible(init, g);
  if (noise.n_steps < cfg.n_steps) fail(ErrorKind::kShapeMismatch, "noise path is too short");
  if (inputs.V != nullptr && (inputs.V->rows() != g.n_nodes() || inputs.V->cols() < cfg.n_steps)) {
    fail(ErrorKind::kShapeMismatch, "potential control must be N x n_steps");
  }
  if (inputs.sigma != nullptr &&
      (inputs.sigma->rows() != g.n_nodes() || inputs.sigma->cols() < cfg.n_steps)) {
    fail(ErrorKind::kShapeMismatch, "diffusion control must be N x n_steps");
  }
  Trajectory traj;
  traj.noise = noise;
  traj.states.reserve(cfg.n_steps + 1);
  traj.diagnostics.reserve(cfg.n_steps + 1);
  traj.w.reserve(cfg.n_steps + 1);
  traj.states.push_back(init);
  traj.w.push_back(0.0);
  const bool controlled = inputs.V != nullptr || inputs.sigma != nullptr;
  traj.diagnostics.push_back(
      diagnose(init, g, controlled && cfg.n_steps > 0 ? params_at_step(params, inputs, 0) : params));
  ModelParams local = params;
  for (int n = 0; n < cfg.n_steps; ++n) {
    if (controlled) {
      if (inputs.V != nullptr) local.V = inputs.V->col(n);
      if (inputs.sigma != nullptr) local.sigma = inputs.sigma->col(n);
    }
    StepReport rep;
    try {
      traj.states.push_back(step_midpoint(traj.states.back(), g, local, noise.increments[n], cfg, &rep));
    } catch (const Error& e) {
      traj.failure = e.kind();
      traj.failure_message = "step " + std::to_string(n) + ": " + e.what();
      break;
    }
    traj.states.back().t = init.t + (n + 1) * cfg.dt;
    traj.w.push_back(traj.w.back() + rep.increment);
    traj.diagnostics.push_back(diagnose(traj.states.back(), g, local));
  }
  return traj;
}

}  // namespace snls
