#include "snls/integrator.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "snls/checks.hpp"
#include "snls/ensemble.hpp"
#include "snls/geometry.hpp"
#include "test_support.hpp"

namespace snls {
namespace {

MadelungState k2_state(double r0, double s0) {
  MadelungState st;
  st.rho = Eigen::Vector2d(r0, 1.0 - r0);
  st.s = Eigen::Vector2d(s0, -s0);
  return st;
}

IntegratorConfig config(double dt, double horizon) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = static_cast<int>(std::lround(horizon / dt));
  return cfg;
}

TEST(Brownian, Deterministic) {
  const NoisePath a = sample_brownian(42, 1e-3, 500);
  const NoisePath b = sample_brownian(42, 1e-3, 500);
  for (int k = 0; k < 500; ++k) EXPECT_EQ(a.increments[k], b.increments[k]);
  const NoisePath c = sample_brownian(43, 1e-3, 500);
  EXPECT_NE(a.increments[0], c.increments[0]);
  EXPECT_EQ(a.w(0), 0.0);
  EXPECT_DOUBLE_EQ(a.w(2), a.increments[0] + a.increments[1]);
}

TEST(Brownian, MeanWithinCltBound) {
  const double dt = 1e-3;
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    const NoisePath p = sample_brownian(seed, dt, 10000);
    EXPECT_LE(std::abs(p.increments.mean()), 4.0 * std::sqrt(dt / 1e4));
  }
}

TEST(Brownian, VarianceWithinFivePercent) {
  const double dt = 1e-3;
  const NoisePath p = sample_brownian(7, dt, 100000);
  const double var = p.increments.squaredNorm() / p.n_steps;
  EXPECT_NEAR(var, dt, 0.05 * dt);
}

TEST(StepMidpoint, StationaryPoint) {
  const Graph g = testing::triangle();
  const MadelungState st = uniform_state(3);
  const MadelungState next = step_midpoint(st, g, snls1_params(3), 0.01, IntegratorConfig{});
  EXPECT_LE((next.rho - st.rho).lpNorm<Eigen::Infinity>(), 1e-15);
  EXPECT_LE((next.s - st.s).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(StepMidpoint, PlaneWaveShiftsPhaseExactly) {
  const int n = 8;
  const double dx = 0.5;
  const int m = 3;
  const Graph g = build_ring_lattice({n, dx, true});
  MadelungState st = uniform_state(n);
  const double k = 2 * std::numbers::pi * m / (n * dx);
  const double mu = 0.5 * k * k;
  for (int j = 0; j < n; ++j) st.s[j] = k * j * dx;
  st.winding.assign(g.n_edges(), 0);
  st.winding[*g.edge_index(0, n - 1)] = m;
  ModelParams p = snls1_params(n);
  p.sigma.setConstant(0.3);
  const IntegratorConfig cfg = config(1e-3, 1.0);
  const double dw = 0.02;
  const MadelungState next = step_midpoint(st, g, p, dw, cfg);
  EXPECT_LE((next.rho - st.rho).lpNorm<Eigen::Infinity>(), 1e-15);
  for (int j = 0; j < n; ++j) EXPECT_NEAR(next.s[j], st.s[j] - mu * cfg.dt - 0.3 * dw, 1e-13);
}

TEST(StepMidpoint, MassAfterStep) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const Graph g = testing::random_graph(rng, n, 0.4);
    const MadelungState st = testing::random_state(rng, n, 0.2);
    for (Preset preset : {Preset::kSnls1, Preset::kSnls2}) {
      ModelParams p = preset == Preset::kSnls1 ? snls1_params(n) : snls2_params(n);
      p.sigma.setConstant(0.4);
      const MadelungState next = step_midpoint(st, g, p, 0.003, config(1e-3, 1.0));
      EXPECT_LE(std::abs(next.rho.sum() - 1.0), 1e-14);
    }
  }
}

TEST(StepMidpoint, TypedFailures) {
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  IntegratorConfig cfg = config(1e-3, 1.0);
  cfg.density_floor = 0.2999999;
  // Mass flows towards the larger phase, so S_0 < S_1 drains node 0.
  try {
    step_midpoint(k2_state(0.3, -1.0), g, p, 0.0, cfg);
    FAIL() << "expected DensityFloorHit";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDensityFloorHit);
  }
  IntegratorConfig big = config(5.0, 5.0);
  big.fixedpoint_maxiter = 5;
  try {
    step_midpoint(k2_state(0.3, 2.0), g, p, 0.0, big);
    FAIL() << "expected a failure";
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::kFixedPointDiverged || e.kind() == ErrorKind::kDensityFloorHit);
  }
}

TEST(IntegratePath, PartialTrajectoryOnFloorHit) {
  const Graph g = testing::k2();
  IntegratorConfig cfg = config(1e-2, 1.0);
  cfg.density_floor = 0.25;
  const Trajectory tr = integrate_path(k2_state(0.3, -1.0), g, snls1_params(2),
                                       sample_brownian(1, cfg.dt, cfg.n_steps), cfg);
  EXPECT_FALSE(tr.ok());
  EXPECT_EQ(*tr.failure, ErrorKind::kDensityFloorHit);
  EXPECT_GT(tr.n_steps(), 0);
  EXPECT_LT(tr.n_steps(), cfg.n_steps);
  for (const auto& st : tr.states) EXPECT_GT(st.rho.minCoeff(), 0.25);
}

TEST(IntegratePath, DeterministicEnergyDrift) {
  const Graph g = testing::k2();
  const IntegratorConfig cfg = config(1e-3, 1.0);
  const Trajectory tr = integrate_path(k2_state(0.45, 0.1), g, snls1_params(2),
                                       sample_brownian(1, cfg.dt, cfg.n_steps), cfg);
  ASSERT_TRUE(tr.ok());
  EXPECT_EQ(tr.n_steps(), cfg.n_steps);
  EXPECT_LE(shifted_energy_drift(tr, g, snls1_params(2)), 1e-8);
}

TEST(IntegratePath, ConstantSigmaShiftedEnergy) {
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  p.sigma.setConstant(0.3);
  const IntegratorConfig cfg = config(1e-3, 1.0);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Trajectory tr = integrate_path(k2_state(0.45, 0.1), g, p,
                                         sample_brownian(seed, cfg.dt, cfg.n_steps), cfg);
    EXPECT_LE(shifted_energy_drift(tr, g, p), 1e-8);
    EXPECT_LE(max_mass_residual(tr), 1e-12);
  }
}

TEST(IntegratePath, ConstantSigmaDriftIsSecondOrder) {
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  p.sigma.setConstant(0.3);
  double drift[2];
  for (int h = 0; h < 2; ++h) {
    const IntegratorConfig cfg = config(1e-3 / (1 << h), 1.0);
    const Trajectory tr = integrate_path(k2_state(0.3, 0.3), g, p,
                                         sample_brownian(5, cfg.dt, cfg.n_steps), cfg);
    drift[h] = shifted_energy_drift(tr, g, p);
  }
  EXPECT_GE(drift[0] / drift[1], 3.5);
  EXPECT_LE(drift[0] / drift[1], 4.5);
}

TEST(IntegratePath, Snls2ConservesH1) {
  const Graph g = testing::k2();
  const ModelParams p = snls2_params(2);
  const IntegratorConfig cfg = config(1e-3, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Trajectory tr = integrate_path(k2_state(0.475, 0.05), g, p,
                                         sample_brownian(seed, cfg.dt, cfg.n_steps), cfg);
    ASSERT_TRUE(tr.ok());
    EXPECT_LE(h1_drift(tr, g, p), 1e-5);
    // H0 = V + W vanishes with zero potentials.
    EXPECT_EQ(hamiltonian(tr.states.back(), g, p, Which::kH0), 0.0);
  }
}

TEST(IntegratePath, TimeDependentPotential) {
  const Graph g = testing::k2();
  const IntegratorConfig cfg = config(0.01, 0.1);
  ModelParams p = snls1_params(2);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, cfg.n_steps);
  v.row(0).setConstant(0.7);
  ModelParams fixed = p;
  fixed.V << 0.7, 0.0;
  const NoisePath noise = sample_brownian(3, cfg.dt, cfg.n_steps);
  const Trajectory a = integrate_path(k2_state(0.4, 0.2), g, p, noise, cfg, {&v, nullptr});
  const Trajectory b = integrate_path(k2_state(0.4, 0.2), g, fixed, noise, cfg);
  EXPECT_EQ((a.states.back().s - b.states.back().s).norm(), 0.0);
}

TEST(Ensemble, ParallelismDoesNotChangeResults) {
  const Graph g = testing::triangle();
  ModelParams p = snls1_params(3);
  p.sigma << 0.5, 0.0, -0.2;
  MadelungState init = uniform_state(3);
  init.s << 0.3, -0.1, 0.0;
  const IntegratorConfig cfg = config(1e-2, 1.0);
  const auto seeds = derive_seeds(100, 37);
  const EnsembleResult a = integrate_ensemble(init, g, p, seeds, cfg, 1);
  const EnsembleResult b = integrate_ensemble(init, g, p, seeds, cfg, 8);
  EXPECT_EQ(a.summary.h0_sup_p1, b.summary.h0_sup_p1);
  EXPECT_EQ(a.summary.h0_sup_p2, b.summary.h0_sup_p2);
  ASSERT_EQ(a.summary.min_density_quantiles.size(), b.summary.min_density_quantiles.size());
  for (std::size_t i = 0; i < a.summary.min_density_quantiles.size(); ++i) {
    EXPECT_EQ(a.summary.min_density_quantiles[i].value, b.summary.min_density_quantiles[i].value);
  }
  for (std::size_t k = 0; k < seeds.size(); ++k) EXPECT_EQ(a.paths[k].sup_h0, b.paths[k].sup_h0);
}

TEST(Ensemble, ZeroNoiseGivesIdenticalPaths) {
  const Graph g = testing::k2();
  const IntegratorConfig cfg = config(1e-2, 0.5);
  const EnsembleResult r = integrate_ensemble(k2_state(0.4, 0.2), g, snls1_params(2),
                                              derive_seeds(0, 5), cfg, 2, true);
  for (int k = 1; k < 5; ++k) {
    EXPECT_EQ((r.trajectories[k].states.back().rho - r.trajectories[0].states.back().rho).norm(), 0.0);
    EXPECT_EQ((r.trajectories[k].states.back().s - r.trajectories[0].states.back().s).norm(), 0.0);
  }
}

TEST(Ensemble, NonConstantSigmaPositivityIsMonitored) {
  // Noise on a single node pumps energy; some paths come within ~1e-5 of the
  // boundary where the fixed-point solve stops converging. Those paths must be
  // reported with a typed failure while every stored state stays interior.
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  p.sigma << 1.0, 0.0;
  const IntegratorConfig cfg = config(1e-3, 1.0);
  const EnsembleResult r = integrate_ensemble(uniform_state(2), g, p, derive_seeds(0, 1000), cfg, 4);
  int failed = 0;
  for (const auto& path : r.paths) {
    EXPECT_GT(path.min_density, 0.0);
    if (!path.ok) {
      ++failed;
      EXPECT_TRUE(path.failure.find("DensityFloorHit") != std::string::npos ||
                  path.failure.find("FixedPointDiverged") != std::string::npos)
          << path.failure;
    } else {
      EXPECT_EQ(path.steps_completed, cfg.n_steps);
    }
  }
  EXPECT_EQ(r.summary.failures, failed);
  EXPECT_LT(failed, 100);
  EXPECT_GT(r.summary.min_density_quantiles.front().value, 0.0);
  int counted = 0;
  for (const auto& b : r.summary.min_density_histogram) counted += b.count;
  EXPECT_EQ(counted, 1000 - failed);
}

TEST(Transverse, ZeroShift) {
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  p.sigma.setConstant(0.3);
  const IntegratorConfig cfg = config(1e-3, 1.0);
  EXPECT_LE(transverse_check(k2_state(0.3, 0.3), g, p, 0.0, sample_brownian(2, cfg.dt, cfg.n_steps), cfg),
            1e-14);
}

TEST(Transverse, UnitShift) {
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  p.sigma.setConstant(0.3);
  const IntegratorConfig cfg = config(1e-3, 1.0);
  EXPECT_LE(transverse_check(k2_state(0.3, 0.3), g, p, 1.0, sample_brownian(2, cfg.dt, cfg.n_steps), cfg),
            5e-6);
}

TEST(Reversibility, ZeroSteps) {
  const Graph g = testing::k2();
  IntegratorConfig cfg = config(1e-3, 1.0);
  cfg.n_steps = 0;
  EXPECT_EQ(reversibility_check(k2_state(0.3, 0.3), g, snls1_params(2), sample_brownian(1, 1e-3, 0), cfg), 0.0);
}

TEST(Reversibility, ReturnsToStart) {
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  p.sigma.setConstant(0.3);
  IntegratorConfig cfg = config(1e-3, 0.5);
  cfg.fixedpoint_tol = 1e-13;
  EXPECT_LE(reversibility_check(k2_state(0.3, 0.3), g, p, sample_brownian(5, cfg.dt, cfg.n_steps), cfg), 1e-9);
}

TEST(Reversibility, ErrorTracksSolverTolerance) {
  const Graph g = testing::k2();
  ModelParams p = snls1_params(2);
  p.sigma.setConstant(0.3);
  IntegratorConfig loose = config(1e-3, 0.5);
  loose.fixedpoint_tol = 1e-10;
  IntegratorConfig tight = loose;
  tight.fixedpoint_tol = 1e-13;
  const NoisePath noise = sample_brownian(5, loose.dt, loose.n_steps);
  const double e_loose = reversibility_check(k2_state(0.3, 0.3), g, p, noise, loose);
  const double e_tight = reversibility_check(k2_state(0.3, 0.3), g, p, noise, tight);
  EXPECT_GE(e_loose, 10.0 * e_tight);
}

}  // namespace
}  // namespace snls
