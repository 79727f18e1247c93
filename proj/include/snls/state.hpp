#pragma once

#include <vector>

#include <Eigen/Dense>

#include "snls/graph.hpp"

namespace snls {

// Density and phase potential at time t. `winding` holds one integer per
// canonical edge (possibly empty = all zero); the phase difference across edge
// (a, b) is S_a - S_b + 2*pi*winding. Nonzero windings only arise for waves
// that wrap a periodic ring.
struct MadelungState {
  Eigen::VectorXd rho;
  Eigen::VectorXd s;
  std::vector<int> winding;
  double t = 0.0;

  int n_nodes() const noexcept { return static_cast<int>(rho.size()); }
};

using ComplexState = Eigen::VectorXcd;

// Uniform density, zero phase.
MadelungState uniform_state(int n);

// Edge phase differences D_e = S_a - S_b + 2*pi*w_e.
Eigen::VectorXd edge_phase_diff(const Graph& g, const Eigen::VectorXd& s,
                                const std::vector<int>& winding);

// BoundaryDensity unless every rho_i > 0; ShapeMismatch on size errors.
void require_interior(const Eigen::VectorXd& rho);
void require_compatible(const MadelungState& state, const Graph& g);

}  // namespace snls
