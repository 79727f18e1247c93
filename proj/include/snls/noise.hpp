#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace snls {

// Driving scalar Brownian motion on a uniform grid. Increments are regenerated
// bit-exactly from (seed, dt, n_steps).
struct NoisePath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  int n_steps = 0;
  Eigen::VectorXd increments;

  // W(t_n) = sum_{k<n} dW_k.
  double w(int n) const;
};

// Counter-based standard normal: the value depends only on (seed, counter).
double standard_normal(std::uint64_t seed, std::uint64_t counter);

NoisePath sample_brownian(std::uint64_t seed, double dt, int n_steps);

// |dW| <= c_clip sqrt(dt).
double clip_increment(double dw, double dt, double c_clip);

}  // namespace snls
