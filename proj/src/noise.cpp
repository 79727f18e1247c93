#include "snls/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "snls/errors.hpp"

namespace snls {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 output number `counter` of the stream keyed by `seed`.
inline std::uint64_t hash(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t key = mix64(seed + 0x9e3779b97f4a7c15ULL);
  return mix64(key + (counter + 1) * 0x9e3779b97f4a7c15ULL);
}

// Uniform on (0, 1].
inline double unit(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

double NoisePath::w(int n) const {
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += increments[k];
  return sum;
}

double standard_normal(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = unit(hash(seed, 2 * counter));
  const double u2 = unit(hash(seed, 2 * counter + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoisePath sample_brownian(std::uint64_t seed, double dt, int n_steps) {
  if (!(dt > 0.0)) fail(ErrorKind::kInvalidArgument, "dt must be positive");
  if (n_steps < 0) fail(ErrorKind::kInvalidArgument, "n_steps must be nonnegative");
  NoisePath path;
  path.seed = seed;
  path.dt = dt;
  path.n_steps = n_steps;
  path.increments.resize(n_steps);
  const double scale = std::sqrt(dt);
  for (int k = 0; k < n_steps; ++k) {
    path.increments[k] = scale * standard_normal(seed, static_cast<std::uint64_t>(k));
  }
  return path;
}

double clip_increment(double dw, double dt, double c_clip) {
  const double bound = c_clip * std::sqrt(dt);
  return std::clamp(dw, -bound, bound);
}

}  // namespace snls
