#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "snls/graph.hpp"
#include "snls/model.hpp"
#include "snls/state.hpp"

namespace snls {

// Probability weights Theta(x, y) on an edge. OutOfDomain for x <= 0 or y <= 0.
double theta(double x, double y, ThetaKind kind);
std::pair<double, double> dtheta(double x, double y, ThetaKind kind);

// Discrete gradient sqrt(omega_ab) (S_a - S_b) stored on canonical edges; the
// value on the reversed pair is the negation.
Eigen::VectorXd grad_G(const Eigen::VectorXd& s, const Graph& g);
double edge_value(const Graph& g, const Eigen::VectorXd& edge_field, int i, int j);

// (div)_i = sum_{j in N(i)} theta_ij omega_ij (S_j - S_i).
Eigen::VectorXd div_theta(const Eigen::VectorXd& rho, const Eigen::VectorXd& s, const Graph& g,
                          ThetaKind kind, const std::vector<int>& winding = {});

// K = 1/2 sum_edges omega (S_a - S_b)^2 theta(rho_a, rho_b).
double kinetic_energy(const Eigen::VectorXd& rho, const Eigen::VectorXd& s, const Graph& g,
                      ThetaKind kind, const std::vector<int>& winding = {});

struct KineticGradient {
  Eigen::VectorXd d_rho;
  Eigen::VectorXd d_s;
};
KineticGradient kinetic_gradient(const Eigen::VectorXd& rho, const Eigen::VectorXd& s,
                                 const Graph& g, ThetaKind kind,
                                 const std::vector<int>& winding = {});

// I = sum_edges omega~ (log rho_a - log rho_b)^2 theta~(rho_a, rho_b).
double fisher_information(const Eigen::VectorXd& rho, const Graph& g, ThetaKind tilde_kind);
Eigen::VectorXd fisher_gradient(const Eigen::VectorXd& rho, const Graph& g, ThetaKind tilde_kind);

struct ScalarPotentials {
  double potential = 0.0;    // sum V_i rho_i
  double interaction = 0.0;  // 1/2 sum W_ij rho_i rho_j
  double entropy = 0.0;      // sum rho_i log rho_i - rho_i
  double noise = 0.0;        // sum sigma_i rho_i
};
struct ScalarPotentialGradients {
  Eigen::VectorXd potential;
  Eigen::VectorXd interaction;
  Eigen::VectorXd entropy;
  Eigen::VectorXd noise;
};
ScalarPotentials scalar_potentials(const Eigen::VectorXd& rho, const ModelParams& params);
ScalarPotentialGradients scalar_potential_gradients(const Eigen::VectorXd& rho,
                                                    const ModelParams& params);

struct EnergyTerms {
  double kinetic = 0.0;
  double fisher = 0.0;
  ScalarPotentials scalars;
};
EnergyTerms energy_terms(const MadelungState& state, const Graph& g, const ModelParams& params);
double combine(const EnergyTerms& terms, const HamiltonianCoeffs& c);

struct Hamiltonians {
  double h0 = 0.0;
  double h1 = 0.0;
};
Hamiltonians hamiltonians(const MadelungState& state, const Graph& g, const ModelParams& params);
double hamiltonian(const MadelungState& state, const Graph& g, const ModelParams& params,
                   Which which);

struct VectorField {
  Eigen::VectorXd drho;
  Eigen::VectorXd ds;
};

// Canonical pair (dH/dS, -dH/drho).
VectorField hamiltonian_vector_field(const MadelungState& state, const Graph& g,
                                     const ModelParams& params, Which which);

// Allocation-free kernel behind hamiltonian_vector_field; drho and ds are
// resized when needed. No interior check.
void eval_field(const Graph& g, const ModelParams& params, const HamiltonianCoeffs& c,
                const Eigen::VectorXd& rho, const Eigen::VectorXd& s,
                const std::vector<int>& winding, Eigen::VectorXd& drho, Eigen::VectorXd& ds);

// Real 2N x 2N Jacobian of the field in (rho, S) ordering, by central
// differences with step 1e-6 (1 + |y|).
Eigen::MatrixXd field_jacobian(const MadelungState& state, const Graph& g,
                               const ModelParams& params, Which which);

ComplexState madelung_to_complex(const MadelungState& state);
// ZeroAmplitude if |u_j| < 1e-14. With a hint, each S_j is the branch of
// arg u_j closest to hint_j and the hint's windings are kept.
MadelungState complex_to_madelung(const ComplexState& u, const MadelungState* hint = nullptr);

// Per-node Jacobian of (Re u, Im u) with respect to (rho, S), as a 2N x 2N
// matrix with (Re u_0.., Im u_0..) rows and (rho_0.., S_0..) columns.
Eigen::MatrixXd madelung_tangent_map(const MadelungState& state);

// Linearization of du/dt = u (f_rho / (2 rho) + i f_S) in (Re u, Im u)
// coordinates, given the Madelung Jacobian A and field f at the state:
// (T A + dT[f]) T^{-1}, where dT[f] differentiates T(y) f with f frozen.
Eigen::MatrixXd complex_linearization(const MadelungState& state, const Eigen::MatrixXd& a,
                                      const VectorField& f);
Eigen::MatrixXd complex_linearization(const MadelungState& state, const Graph& g,
                                      const ModelParams& params, Which which);

// Nonlinear graph Laplacian. The Madelung overload uses the state's phase
// branch; the complex overload converts with the optional hint.
ComplexState nonlinear_laplacian(const MadelungState& state, const Graph& g, ThetaKind kind,
                                 ThetaKind tilde_kind);
ComplexState nonlinear_laplacian(const ComplexState& u, const Graph& g, ThetaKind kind,
                                 ThetaKind tilde_kind, const MadelungState* hint = nullptr);

}  // namespace snls
