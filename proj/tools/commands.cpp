#include "snls/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <spdlog/spdlog.h>

#include "snls/app/io.hpp"
#include "snls/checks.hpp"
#include "snls/ensemble.hpp"
#include "snls/geometry.hpp"
#include "snls/noise.hpp"
#include "snls/parallel.hpp"

namespace snls::app {

using nlohmann::json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kShapeMismatch:
    case ErrorKind::kIndexOutOfRange:
    case ErrorKind::kDisconnectedGraph:
    case ErrorKind::kSelfLoop:
    case ErrorKind::kDuplicateEdge:
    case ErrorKind::kNonpositiveWeight:
    case ErrorKind::kTooFewNodes:
    case ErrorKind::kNotALattice:
    case ErrorKind::kNonConstantSigma:
    case ErrorKind::kUnsupportedModel:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

std::string output_dir(const RunConfig& cfg, const CommandOptions& opts) {
  return opts.output_dir.empty() ? cfg.output_dir : opts.output_dir;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int q = 0; q < m.cols(); ++q) row.push_back(m(i, q));
    rows.push_back(std::move(row));
  }
  return rows;
}

double rel_discrepancy(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

double rel_discrepancy(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

// Writes the manifest and finalizes the outcome.
CommandOutcome finish(const std::string& command, const RunConfig& cfg, const std::string& dir,
                      Clock::time_point start, CommandOutcome out) {
  json manifest;
  manifest["command"] = command;
  manifest["config_hash"] = cfg.hash;
  manifest["config"] = cfg.effective;
  manifest["tool_version"] = kToolVersion;
  manifest["seed_rule"] = "path k uses seed = base_seed + k";
  manifest["exit_code"] = out.exit_code;
  manifest["summary"] = out.summary;
  manifest["wall_clock_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  const std::string path = join_path(dir, "manifest.json");
  write_json(path, manifest);
  out.files.push_back(path);
  return out;
}

CsvTable trajectory_table(const RunConfig& cfg, const Trajectory& tr) {
  const int n = cfg.graph.n_nodes();
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < n; ++i) cols.push_back("rho_" + std::to_string(i));
  for (int i = 0; i < n; ++i) cols.push_back("s_" + std::to_string(i));
  cols.insert(cols.end(), {"W", "mass_residual", "H0"});
  CsvTable table(cfg.hash, cols);
  for (std::size_t q = 0; q < tr.states.size(); ++q) {
    std::vector<double> row{tr.states[q].t};
    for (int i = 0; i < n; ++i) row.push_back(tr.states[q].rho[i]);
    for (int i = 0; i < n; ++i) row.push_back(tr.states[q].s[i]);
    row.push_back(tr.w[q]);
    row.push_back(tr.diagnostics[q].mass_residual);
    row.push_back(tr.diagnostics[q].h0);
    table.add_row(row);
  }
  return table;
}

json summary_json(const EnsembleSummary& s) {
  json j;
  j["n_paths"] = s.n_paths;
  j["failures"] = s.failures;
  j["density_floor_hits"] = s.density_floor_hits;
  j["h0_sup_moment1"] = s.h0_sup_p1;
  j["h0_sup_moment2"] = s.h0_sup_p2;
  j["max_mass_residual"] = s.max_mass_residual;
  json q = json::array();
  for (const auto& x : s.min_density_quantiles) q.push_back({{"level", x.level}, {"value", x.value}});
  j["min_density_quantiles"] = q;
  json h = json::array();
  for (const auto& b : s.min_density_histogram) {
    h.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
  }
  j["min_density_histogram"] = h;
  return j;
}

Eigen::MatrixXd random_direction(std::uint64_t seed, int rows, int cols) {
  Eigen::MatrixXd d(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int q = 0; q < cols; ++q) d(i, q) = standard_normal(seed, static_cast<std::uint64_t>(i) * cols + q);
  }
  return d;
}

}  // namespace

CommandOutcome run_simulate(const RunConfig& cfg, const CommandOptions& opts) {
  const auto start = Clock::now();
  const std::string dir = output_dir(cfg, opts);
  ensure_directory(dir);
  const auto seeds = derive_seeds(cfg.base_seed, cfg.n_paths);
  const int keep = std::min(cfg.simulate.write_paths, cfg.n_paths);
  spdlog::info("simulate: {} paths, {} steps, dt = {}", cfg.n_paths, cfg.integrator.n_steps, cfg.integrator.dt);

  // Trajectories are regenerated for the written paths only.
  const EnsembleResult ens =
      integrate_ensemble(cfg.initial, cfg.graph, cfg.params, seeds, cfg.integrator, opts.parallelism);
  CommandOutcome out;
  for (int k = 0; k < keep; ++k) {
    const Trajectory tr = integrate_path(cfg.initial, cfg.graph, cfg.params,
                                         sample_brownian(seeds[k], cfg.integrator.dt, cfg.integrator.n_steps),
                                         cfg.integrator);
    char name[64];
    std::snprintf(name, sizeof name, "trajectory_%04d.csv", k);
    const std::string path = join_path(dir, name);
    write_text(path, trajectory_table(cfg, tr).str());
    out.files.push_back(path);
  }

  CsvTable paths(cfg.hash, {"path", "seed", "ok", "steps_completed", "sup_h0", "min_density",
                            "max_mass_residual", "failure"});
  for (std::size_t k = 0; k < ens.paths.size(); ++k) {
    const auto& p = ens.paths[k];
    std::string failure = p.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    paths.add_row({std::to_string(k), std::to_string(p.seed), p.ok ? "1" : "0",
                   std::to_string(p.steps_completed), format_double(p.sup_h0),
                   format_double(p.min_density), format_double(p.max_mass_residual), failure});
  }
  const std::string paths_file = join_path(dir, "paths.csv");
  write_text(paths_file, paths.str());
  out.files.push_back(paths_file);

  json summary = summary_json(ens.summary);
  summary["config_hash"] = cfg.hash;
  const std::string summary_file = join_path(dir, "ensemble_summary.json");
  write_json(summary_file, summary);
  out.files.push_back(summary_file);
  out.summary = summary;
  if (ens.summary.failures > 0) spdlog::warn("{} of {} paths failed", ens.summary.failures, cfg.n_paths);
  return finish("simulate", cfg, dir, start, std::move(out));
}

CommandOutcome run_invariants(const RunConfig& cfg, const CommandOptions& opts) {
  const auto start = Clock::now();
  const std::string dir = output_dir(cfg, opts);
  ensure_directory(dir);
  const auto seeds = derive_seeds(cfg.base_seed, cfg.n_paths);
  const int m = cfg.n_paths;
  const bool snls2 = cfg.params.preset == Preset::kSnls2;
  const bool energy_applicable = snls2 || has_uniform_sigma(cfg.params);

  std::vector<double> mass(m), energy(m), transverse(m), reversibility(m);
  std::vector<std::string> failures(m);
  parallel_for(m, opts.parallelism, [&](int k) {
    const NoisePath noise = sample_brownian(seeds[k], cfg.integrator.dt, cfg.integrator.n_steps);
    const Trajectory tr = integrate_path(cfg.initial, cfg.graph, cfg.params, noise, cfg.integrator);
    if (!tr.ok()) {
      failures[k] = tr.failure_message;
      return;
    }
    mass[k] = max_mass_residual(tr);
    if (energy_applicable) {
      energy[k] = snls2 ? h1_drift(tr, cfg.graph, cfg.params) : shifted_energy_drift(tr, cfg.graph, cfg.params);
    }
    transverse[k] = transverse_check(cfg.initial, cfg.graph, cfg.params, cfg.invariants.alpha, noise, cfg.integrator);
    reversibility[k] = reversibility_check(cfg.initial, cfg.graph, cfg.params, noise, cfg.integrator);
  });
  for (int k = 0; k < m; ++k) {
    if (!failures[k].empty()) fail(ErrorKind::kPathFailure, "seed " + std::to_string(seeds[k]) + ": " + failures[k]);
  }
  auto worst = [](const std::vector<double>& v) {
    double w = 0.0;
    for (double x : v) w = std::isnan(x) || std::isnan(w) ? NAN : std::max(w, x);
    return w;
  };
  auto check = [](const std::string& name, double measured, double tol, bool applicable) {
    json c;
    c["name"] = name;
    c["applicable"] = applicable;
    c["measured"] = measured;
    c["tolerance"] = tol;
    c["passed"] = !applicable || measured <= tol;
    return c;
  };
  json checks = json::array();
  checks.push_back(check("mass", worst(mass), cfg.invariants.mass_tol, true));
  checks.push_back(check(snls2 ? "energy_h1" : "energy_shifted_h0", worst(energy), cfg.invariants.energy_tol,
                         energy_applicable));
  checks.push_back(check("transverse", worst(transverse), cfg.invariants.transverse_tol, true));
  checks.push_back(check("reversibility", worst(reversibility), cfg.invariants.reversibility_tol, true));
  bool all = true;
  for (const auto& c : checks) all = all && c["passed"].get<bool>();

  json report;
  report["config_hash"] = cfg.hash;
  report["n_paths"] = m;
  report["checks"] = checks;
  report["passed"] = all;
  const std::string file = join_path(dir, "invariants_report.json");
  write_json(file, report);
  CommandOutcome out;
  out.files.push_back(file);
  out.summary = report;
  out.exit_code = all ? kExitOk : kExitInvariant;
  for (const auto& c : checks) {
    spdlog::info("{}: measured {} tolerance {} {}", c["name"].get<std::string>(), c["measured"].dump(),
                 c["tolerance"].dump(), c["passed"].get<bool>() ? "pass" : "FAIL");
  }
  return finish("invariants", cfg, dir, start, std::move(out));
}

CommandOutcome run_dispersion(const RunConfig& cfg, const CommandOptions& opts) {
  const auto start = Clock::now();
  const std::string dir = output_dir(cfg, opts);
  ensure_directory(dir);
  const DispersionConfig& d = cfg.dispersion;
  const Graph ring = build_ring_lattice({d.n_nodes, d.dx, true});
  std::vector<int> modes = d.modes;
  if (modes.empty()) {
    for (int k = 0; k < d.n_nodes; ++k) modes.push_back(k);
  }
  const auto rows = scan_wavenumbers(ring, d.sigma, d.stencils, modes, d.equation);
  CsvTable table(cfg.hash, {"mode", "K", "mu", "scheme", "residual_real", "residual_imag"});
  double worst_nonlinear = 0.0;
  for (const auto& r : rows) {
    table.add_row({std::to_string(r.mode), format_double(r.k), format_double(r.mu), r.scheme,
                   format_double(r.residual_real), format_double(r.residual_imag)});
    if (r.scheme == "nonlinear") {
      worst_nonlinear = std::max({worst_nonlinear, std::abs(r.residual_real), std::abs(r.residual_imag)});
    }
  }
  const std::string file = join_path(dir, "dispersion.csv");
  write_text(file, table.str());
  CommandOutcome out;
  out.files.push_back(file);
  out.summary = {{"rows", table.n_rows()}, {"max_nonlinear_residual", worst_nonlinear}};
  return finish("dispersion", cfg, dir, start, std::move(out));
}

CommandOutcome run_gradcheck(const RunConfig& cfg, const CommandOptions& opts) {
  const auto start = Clock::now();
  const std::string dir = output_dir(cfg, opts);
  ensure_directory(dir);
  const ControlSetup setup = control_setup(cfg, opts.parallelism);
  const QuadraticCost cost(resolve_cost(cfg, setup));
  const ControlPath control{cfg.problem.kind, cfg.problem.init.cwiseMax(-cfg.problem.alpha).cwiseMin(cfg.problem.alpha)};
  const int n = setup.graph.n_nodes();
  const int steps = setup.n_steps();
  const double tol = cfg.solver.discrepancy_tol;
  BsdeOptions bopts;
  bopts.degree = cfg.solver.bsde_degree;

  spdlog::info("gradcheck: {} paths, {} steps", setup.n_paths(), steps);
  const LinearizedEnsemble lin = linearize(control, setup);
  const CostBreakdown j = cost_from_forward(lin.forward, cost, setup);
  const Eigen::MatrixXd g_sens = gradient_sensitivity(lin, cost, setup);
  const BsdeSolution bsde = bsde_solve(lin, cost, setup, bopts);
  const Eigen::MatrixXd g_bsde = gradient_from_bsde(bsde, lin, cost, setup);
  const Eigen::MatrixXd g_fd = gradient_fd(control, cost, setup, cfg.solver.fd_eps);

  bool passed = true;
  json discrepancies;
  discrepancies["fd_sensitivity"] = rel_discrepancy(g_fd, g_sens);
  discrepancies["fd_bsde"] = rel_discrepancy(g_fd, g_bsde);
  discrepancies["sensitivity_bsde"] = rel_discrepancy(g_sens, g_bsde);
  for (const auto& [k, v] : discrepancies.items()) passed = passed && v.get<double>() <= tol;

  json directional = json::array();
  for (int k = 0; k < cfg.solver.directions; ++k) {
    const Eigen::MatrixXd d = random_direction(cfg.solver.direction_seed + k, n, steps);
    const double fd = directional_derivative_fd(control, d, cost, setup, cfg.solver.fd_eps);
    const double sens = setup.dt() * (g_sens.array() * d.array()).sum();
    const double bs = setup.dt() * (g_bsde.array() * d.array()).sum();
    const DualityCheck dual = duality_check(bsde, lin, d, cost, setup);
    const double worst = std::max({rel_discrepancy(fd, sens), rel_discrepancy(fd, bs), rel_discrepancy(sens, bs)});
    passed = passed && worst <= tol && dual.rel_error <= tol;
    directional.push_back({{"fd", fd}, {"sensitivity", sens}, {"bsde", bs}, {"max_rel_discrepancy", worst},
                           {"duality_lhs", dual.lhs}, {"duality_rhs", dual.rhs},
                           {"duality_rel_error", dual.rel_error}});
  }

  json report;
  report["config_hash"] = cfg.hash;
  report["J"] = {{"total", j.j}, {"terminal", j.terminal}, {"running_state", j.running_state},
                 {"running_control", j.running_control}};
  report["grad_fd"] = matrix_json(g_fd);
  report["grad_sens"] = matrix_json(g_sens);
  report["grad_bsde"] = matrix_json(g_bsde);
  report["discrepancies"] = discrepancies;
  report["directional"] = directional;
  report["regression_max_condition"] = bsde.max_condition;
  report["tolerance"] = tol;
  report["passed"] = passed;
  const std::string file = join_path(dir, "gradcheck.json");
  write_json(file, report);
  CommandOutcome out;
  out.files.push_back(file);
  out.summary = {{"passed", passed}, {"discrepancies", discrepancies}, {"J", j.j}};
  out.exit_code = passed ? kExitOk : kExitInvariant;
  return finish("gradcheck", cfg, dir, start, std::move(out));
}

CommandOutcome run_optimize(const RunConfig& cfg, const CommandOptions& opts) {
  const auto start = Clock::now();
  const std::string dir = output_dir(cfg, opts);
  ensure_directory(dir);
  const ControlSetup setup = control_setup(cfg, opts.parallelism);
  const QuadraticCost cost(resolve_cost(cfg, setup));
  PgdOptions p;
  p.alpha = cfg.problem.alpha;
  p.step0 = cfg.solver.step0;
  p.backtrack = cfg.solver.backtrack;
  p.armijo = cfg.solver.armijo;
  p.max_halvings = cfg.solver.max_halvings;
  p.max_iters = cfg.solver.max_iters;
  p.tol = cfg.solver.tol;
  p.barzilai_borwein = cfg.solver.barzilai_borwein;
  p.source = cfg.solver.source;
  p.bsde.degree = cfg.solver.bsde_degree;
  p.fd_eps = cfg.solver.fd_eps;
  spdlog::info("optimize: {} paths, {} steps, gradient {}", setup.n_paths(), setup.n_steps(), to_string(p.source));
  const PgdResult res = optimize_pgd(cost, ControlPath{cfg.problem.kind, cfg.problem.init}, setup, p);

  CsvTable history(cfg.hash, {"iter", "J", "grad_norm", "step", "stationarity_residual"});
  for (const auto& h : res.history) {
    history.add_row({std::to_string(h.iter), format_double(h.j), format_double(h.grad_norm),
                     format_double(h.step), format_double(h.stationarity)});
  }
  const int n = setup.graph.n_nodes();
  std::vector<std::string> cols{"t"};
  const std::string prefix = cfg.problem.kind == ControlKind::kPotential ? "V_" : "sigma_";
  for (int i = 0; i < n; ++i) cols.push_back(prefix + std::to_string(i));
  CsvTable control(cfg.hash, cols);
  for (int q = 0; q < setup.n_steps(); ++q) {
    std::vector<double> row{q * setup.dt()};
    for (int i = 0; i < n; ++i) row.push_back(res.control.values(i, q));
    control.add_row(row);
  }
  CommandOutcome out;
  for (const auto& [name, table] : {std::pair<std::string, const CsvTable*>{"history.csv", &history},
                                    std::pair<std::string, const CsvTable*>{"control.csv", &control}}) {
    const std::string path = join_path(dir, name);
    write_text(path, table->str());
    out.files.push_back(path);
  }
  const auto& last = res.history.back();
  out.summary = {{"iterations", last.iter},
                 {"J_initial", res.history.front().j},
                 {"J_final", last.j},
                 {"grad_norm", last.grad_norm},
                 {"stationarity_residual", last.stationarity},
                 {"converged", res.converged},
                 {"grad_source", to_string(p.source)}};
  return finish("optimize", cfg, dir, start, std::move(out));
}

CommandOutcome run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opts) {
  if (name == "simulate") return run_simulate(cfg, opts);
  if (name == "invariants") return run_invariants(cfg, opts);
  if (name == "dispersion") return run_dispersion(cfg, opts);
  if (name == "gradcheck") return run_gradcheck(cfg, opts);
  if (name == "optimize") return run_optimize(cfg, opts);
  fail(ErrorKind::kInvalidArgument, "unknown command '" + name + "'");
}

}  // namespace snls::app
