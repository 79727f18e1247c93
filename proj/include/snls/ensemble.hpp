#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snls/integrator.hpp"

namespace snls {

struct PathSummary {
  std::uint64_t seed = 0;
  bool ok = true;
  std::string failure;
  int steps_completed = 0;
  double sup_h0 = 0.0;  // sup_t |H0|
  double min_density = 0.0;
  double max_mass_residual = 0.0;
};

struct Quantile {
  double level = 0.0;
  double value = 0.0;
};

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  int count = 0;
};

struct EnsembleSummary {
  int n_paths = 0;
  int failures = 0;
  int density_floor_hits = 0;
  double h0_sup_p1 = 0.0;  // E[sup_t |H0|]
  double h0_sup_p2 = 0.0;  // E[sup_t |H0|^2]
  double max_mass_residual = 0.0;
  std::vector<Quantile> min_density_quantiles;
  std::vector<HistogramBin> min_density_histogram;
};

struct EnsembleResult {
  std::vector<PathSummary> paths;
  std::vector<Trajectory> trajectories;  // filled only when requested
  EnsembleSummary summary;
};

// Path k is driven by sample_brownian(seeds[k], cfg.dt, cfg.n_steps). Path
// failures are recorded per path and never abort the ensemble. Summaries are
// reduced in seed order so the result does not depend on `parallelism`.
EnsembleResult integrate_ensemble(const MadelungState& init, const Graph& g,
                                  const ModelParams& params, const std::vector<std::uint64_t>& seeds,
                                  const IntegratorConfig& cfg, int parallelism,
                                  bool keep_trajectories = false, const ControlInputs& inputs = {});

// seeds base, base + 1, ..., base + n - 1.
std::vector<std::uint64_t> derive_seeds(std::uint64_t base_seed, int n_paths);

PathSummary summarize_path(const Trajectory& traj);
EnsembleSummary summarize(const std::vector<PathSummary>& paths);

// Decade bins of log10(min density) between the extreme observed values.
std::vector<HistogramBin> log_histogram(const std::vector<double>& values);

}  // namespace snls
