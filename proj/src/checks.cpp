#include "snls/checks.hpp"

#include <cmath>
#include <complex>

#include "snls/geometry.hpp"

namespace snls {

namespace {

Trajectory run_or_throw(const MadelungState& init, const Graph& g, const ModelParams& p,
                        const NoisePath& noise, const IntegratorConfig& cfg) {
  Trajectory traj = integrate_path(init, g, p, noise, cfg);
  if (!traj.ok()) fail(*traj.failure, traj.failure_message);
  return traj;
}

}  // namespace

double transverse_check(const MadelungState& init, const Graph& g, const ModelParams& params,
                        double alpha, const NoisePath& noise, const IntegratorConfig& cfg) {
  if (!std::isfinite(alpha)) fail(ErrorKind::kInvalidArgument, "alpha must be finite");
  ModelParams shifted = params;
  shifted.V.array() += alpha;
  const Trajectory base = run_or_throw(init, g, params, noise, cfg);
  const Trajectory moved = run_or_throw(init, g, shifted, noise, cfg);
  double worst = 0.0;
  for (std::size_t n = 0; n < base.states.size(); ++n) {
    const double t = base.states[n].t - init.t;
    const std::complex<double> phase = std::polar(1.0, -alpha * t);
    const ComplexState expected = madelung_to_complex(base.states[n]) * phase;
    worst = std::max(worst, (madelung_to_complex(moved.states[n]) - expected).norm());
  }
  return worst;
}

double reversibility_check(const MadelungState& init, const Graph& g, const ModelParams& params,
                           const NoisePath& noise, const IntegratorConfig& cfg) {
  if (cfg.n_steps == 0) return 0.0;
  const Trajectory fwd = run_or_throw(init, g, params, noise, cfg);
  MadelungState z = fwd.states.back();
  z.s = -z.s;
  for (int& w : z.winding) w = -w;
  NoisePath rev = noise;
  for (int k = 0; k < cfg.n_steps; ++k) rev.increments[k] = noise.increments[cfg.n_steps - 1 - k];
  const Trajectory back = run_or_throw(z, g, params, rev, cfg);
  MadelungState end = back.states.back();
  end.s = -end.s;
  for (int& w : end.winding) w = -w;
  return (madelung_to_complex(end) - madelung_to_complex(init)).norm();
}

double max_mass_residual(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& st : traj.states) worst = std::max(worst, std::abs(st.rho.sum() - 1.0));
  return worst;
}

double shifted_energy_drift(const Trajectory& traj, const Graph& g, const ModelParams& params) {
  if (!has_uniform_sigma(params)) {
    fail(ErrorKind::kNonConstantSigma, "shifted energy needs a uniform sigma");
  }
  const double sigma = params.sigma.size() > 0 ? params.sigma[0] : 0.0;
  auto energy = [&](std::size_t n) {
    MadelungState st = traj.states[n];
    st.s.array() += sigma * traj.w[n];
    return hamiltonian(st, g, params, Which::kH0);
  };
  const double h_init = energy(0);
  double worst = 0.0;
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    worst = std::max(worst, std::abs(energy(n) - h_init));
  }
  return worst / std::abs(h_init);
}

double h1_drift(const Trajectory& traj, const Graph& g, const ModelParams& params) {
  const double h_init = hamiltonian(traj.states.front(), g, params, Which::kH1);
  double worst = 0.0;
  for (const auto& st : traj.states) {
    worst = std::max(worst, std::abs(hamiltonian(st, g, params, Which::kH1) - h_init));
  }
  return worst / std::abs(h_init);
}

}  // namespace snls
