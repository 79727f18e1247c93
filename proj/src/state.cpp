#include "snls/state.hpp"

#include <numbers>
#include <string>

#include "snls/errors.hpp"

namespace snls {

MadelungState uniform_state(int n) {
  MadelungState st;
  st.rho = Eigen::VectorXd::Constant(n, 1.0 / n);
  st.s = Eigen::VectorXd::Zero(n);
  return st;
}

Eigen::VectorXd edge_phase_diff(const Graph& g, const Eigen::VectorXd& s,
                                const std::vector<int>& winding) {
  const auto& edges = g.edges();
  Eigen::VectorXd d(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    d[k] = s[edges[k].a] - s[edges[k].b];
    if (!winding.empty() && winding[k] != 0) d[k] += 2.0 * std::numbers::pi * winding[k];
  }
  return d;
}

void require_interior(const Eigen::VectorXd& rho) {
  for (int i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) {
      fail(ErrorKind::kBoundaryDensity, "rho[" + std::to_string(i) + "] is not positive");
    }
  }
}

void require_compatible(const MadelungState& st, const Graph& g) {
  if (st.rho.size() != g.n_nodes() || st.s.size() != g.n_nodes()) {
    fail(ErrorKind::kShapeMismatch, "state size does not match graph");
  }
  if (!st.winding.empty() && static_cast<int>(st.winding.size()) != g.n_edges()) {
    fail(ErrorKind::kShapeMismatch, "winding must have one entry per edge");
  }
  require_interior(st.rho);
}

}  // namespace snls
