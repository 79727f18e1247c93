#pragma once

#include "snls/integrator.hpp"

namespace snls {

// Runs the path with V and with V + alpha on the same noise and returns
// max_t |u^alpha(t) - u(t) exp(-i alpha t)|_2.
double transverse_check(const MadelungState& init, const Graph& g, const ModelParams& params,
                        double alpha, const NoisePath& noise, const IntegratorConfig& cfg);

// Integrates forward, conjugates (S -> -S), integrates again with the forward
// increments in reverse order, conjugates back and returns |u_back(0) - u(0)|_2.
double reversibility_check(const MadelungState& init, const Graph& g, const ModelParams& params,
                           const NoisePath& noise, const IntegratorConfig& cfg);

// max_n |sum rho_n - 1| along a trajectory.
double max_mass_residual(const Trajectory& traj);

// max_n |H(y_n) - H(y_0)| / |H(y_0)| with H = H0 evaluated at (rho, S + sigma W 1)
// where sigma is the uniform noise level. Requires uniform sigma.
double shifted_energy_drift(const Trajectory& traj, const Graph& g, const ModelParams& params);

// Relative drift of H1 along a trajectory.
double h1_drift(const Trajectory& traj, const Graph& g, const ModelParams& params);

}  // namespace snls
