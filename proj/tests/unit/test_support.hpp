#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "snls/graph.hpp"
#include "snls/state.hpp"

namespace snls::testing {

inline Graph k2(double w = 1.0) {
  const std::vector<EdgeSpec> e{{0, 1, w}};
  return build_graph(2, e);
}

inline Graph triangle() {
  const std::vector<EdgeSpec> e{{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 0.5}};
  return build_graph(3, e);
}

// Connected random graph: a random spanning path plus extra edges.
inline Graph random_graph(std::mt19937_64& rng, int n, double extra_prob) {
  std::uniform_real_distribution<double> w(0.2, 3.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<EdgeSpec> edges;
  std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
  for (int k = 0; k + 1 < n; ++k) {
    edges.push_back({perm[k], perm[k + 1], w(rng)});
    has[perm[k]][perm[k + 1]] = has[perm[k + 1]][perm[k]] = 1;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!has[i][j] && coin(rng) < extra_prob) edges.push_back({i, j, w(rng)});
    }
  }
  return build_graph(n, edges);
}

inline MadelungState random_state(std::mt19937_64& rng, int n, double lo = 0.05) {
  std::uniform_real_distribution<double> r(lo, 1.0);
  std::uniform_real_distribution<double> ph(-M_PI, M_PI);
  MadelungState st;
  st.rho.resize(n);
  st.s.resize(n);
  for (int i = 0; i < n; ++i) {
    st.rho[i] = r(rng);
    st.s[i] = ph(rng);
  }
  st.rho /= st.rho.sum();
  return st;
}

inline double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& ref) {
  const double scale = std::max(ref.lpNorm<Eigen::Infinity>(), 1e-12);
  return (a - ref).lpNorm<Eigen::Infinity>() / scale;
}

// Central finite-difference gradient of f at x.
template <class F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd y = x;
  for (int i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace snls::testing
