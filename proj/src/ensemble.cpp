#include "snls/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "snls/parallel.hpp"

namespace snls {

std::vector<std::uint64_t> derive_seeds(std::uint64_t base_seed, int n_paths) {
  std::vector<std::uint64_t> seeds(std::max(n_paths, 0));
  for (int k = 0; k < n_paths; ++k) seeds[k] = base_seed + static_cast<std::uint64_t>(k);
  return seeds;
}

PathSummary summarize_path(const Trajectory& traj) {
  PathSummary s;
  s.seed = traj.noise.seed;
  s.ok = traj.ok();
  if (!s.ok) s.failure = traj.failure_message;
  s.steps_completed = traj.n_steps();
  s.min_density = INFINITY;
  for (const auto& d : traj.diagnostics) {
    s.sup_h0 = std::max(s.sup_h0, std::abs(d.h0));
    s.min_density = std::min(s.min_density, d.min_density);
    s.max_mass_residual = std::max(s.max_mass_residual, std::abs(d.mass_residual));
  }
  return s;
}

std::vector<HistogramBin> log_histogram(const std::vector<double>& values) {
  std::vector<HistogramBin> bins;
  if (values.empty()) return bins;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const int lo = static_cast<int>(std::floor(std::log10(*lo_it)));
  const int hi = std::max(lo + 1, static_cast<int>(std::ceil(std::log10(*hi_it))));
  for (int d = lo; d < hi; ++d) bins.push_back({std::pow(10.0, d), std::pow(10.0, d + 1), 0});
  for (double v : values) {
    const int idx = std::clamp(static_cast<int>(std::floor(std::log10(v))) - lo, 0,
                               static_cast<int>(bins.size()) - 1);
    ++bins[idx].count;
  }
  return bins;
}

EnsembleSummary summarize(const std::vector<PathSummary>& paths) {
  EnsembleSummary out;
  out.n_paths = static_cast<int>(paths.size());
  std::vector<double> mins;
  double p1 = 0.0;
  double p2 = 0.0;
  int good = 0;
  for (const auto& p : paths) {
    out.max_mass_residual = std::max(out.max_mass_residual, p.max_mass_residual);
    if (!p.ok) {
      ++out.failures;
      if (p.failure.find("DensityFloorHit") != std::string::npos) ++out.density_floor_hits;
      continue;
    }
    ++good;
    p1 += p.sup_h0;
    p2 += p.sup_h0 * p.sup_h0;
    mins.push_back(p.min_density);
  }
  if (good > 0) {
    out.h0_sup_p1 = p1 / good;
    out.h0_sup_p2 = p2 / good;
  }
  std::vector<double> sorted = mins;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty()) {
    for (double level : {0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1.0}) {
      const auto idx = static_cast<std::size_t>(std::llround(level * (sorted.size() - 1)));
      out.min_density_quantiles.push_back({level, sorted[idx]});
    }
  }
  out.min_density_histogram = log_histogram(mins);
  return out;
}

EnsembleResult integrate_ensemble(const MadelungState& init, const Graph& g,
                                  const ModelParams& params, const std::vector<std::uint64_t>& seeds,
                                  const IntegratorConfig& cfg, int parallelism,
                                  bool keep_trajectories, const ControlInputs& inputs) {
  if (seeds.empty()) fail(ErrorKind::kInvalidArgument, "ensemble needs at least one seed");
  validate(cfg);
  require_compatible(init, g);
  const int m = static_cast<int>(seeds.size());
  EnsembleResult res;
  res.paths.resize(m);
  if (keep_trajectories) res.trajectories.resize(m);
  parallel_for(m, parallelism, [&](int k) {
    const NoisePath noise = sample_brownian(seeds[k], cfg.dt, cfg.n_steps);
    Trajectory traj = integrate_path(init, g, params, noise, cfg, inputs);
    res.paths[k] = summarize_path(traj);
    if (keep_trajectories) res.trajectories[k] = std::move(traj);
  });
  res.summary = summarize(res.paths);
  return res;
}

}  // namespace snls
