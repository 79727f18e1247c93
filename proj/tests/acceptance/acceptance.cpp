// Acceptance suite: one PASS/FAIL line per criterion. Reports contain only
// values that are functions of the build, so criterion 12 can compare them
// byte for byte across parallelism levels.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snls/bsde.hpp"
#include "snls/checks.hpp"
#include "snls/control.hpp"
#include "snls/dispersion.hpp"
#include "snls/ensemble.hpp"
#include "snls/errors.hpp"
#include "snls/geometry.hpp"
#include "snls/optimize.hpp"
#include "snls/parallel.hpp"
#include "snls/sensitivity.hpp"

namespace snls {
namespace {

struct Outcome {
  bool pass = true;
  std::string report;

  void line(const std::string& text) { report += "  " + text + "\n"; }
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    line(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string measured(const std::string& name, double value, const std::string& bound) {
  return name + " = " + sci(value) + " (" + g17(value) + ") " + bound;
}

Graph k2() {
  const std::vector<EdgeSpec> e{{0, 1, 1.0}};
  return build_graph(2, e);
}

Graph triangle() {
  const std::vector<EdgeSpec> e{{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 0.5}};
  return build_graph(3, e);
}

Graph ring(int n, double dx) { return build_ring_lattice({n, dx, true}); }

MadelungState state(std::vector<double> rho, std::vector<double> s) {
  MadelungState st;
  st.rho = Eigen::Map<Eigen::VectorXd>(rho.data(), rho.size());
  st.s = Eigen::Map<Eigen::VectorXd>(s.data(), s.size());
  return st;
}

// rho_j ~ 1 + a sin(2j + 1), S_j = a cos(2j + 1).
MadelungState perturbed(int n, double a) {
  MadelungState st = uniform_state(n);
  for (int i = 0; i < n; ++i) {
    st.rho[i] = 1.0 + a * std::sin(2.0 * i + 1.0);
    st.s[i] = a * std::cos(2.0 * i + 1.0);
  }
  st.rho /= st.rho.sum();
  return st;
}

IntegratorConfig config(double dt, double horizon, double tol = 1e-12) {
  IntegratorConfig c;
  c.dt = dt;
  c.n_steps = static_cast<int>(std::lround(horizon / dt));
  c.fixedpoint_tol = tol;
  return c;
}

ModelParams snls1(int n, double sigma) {
  ModelParams p = snls1_params(n);
  p.sigma.setConstant(sigma);
  return p;
}

// Coarse path whose increments are sums of consecutive pairs of the fine one,
// so both resolutions see the same Brownian path.
std::pair<NoisePath, NoisePath> nested_noise(std::uint64_t seed, double dt, int n_steps) {
  const NoisePath fine = sample_brownian(seed, 0.5 * dt, 2 * n_steps);
  NoisePath coarse;
  coarse.seed = seed;
  coarse.dt = dt;
  coarse.n_steps = n_steps;
  coarse.increments.resize(n_steps);
  for (int k = 0; k < n_steps; ++k) coarse.increments[k] = fine.increments[2 * k] + fine.increments[2 * k + 1];
  return {coarse, fine};
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::isnan(x) ? x : std::max(m, x);
  return m;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------

Outcome criterion1(int par) {
  Outcome out;
  const std::vector<std::pair<std::string, Graph>> graphs{{"K2", k2()}, {"triangle", triangle()}, {"ring-8", ring(8, 1.0)}};
  const IntegratorConfig cfg = config(1e-3, 1.0);
  for (const char* preset : {"snls1", "snls2"}) {
    for (const auto& [name, g] : graphs) {
      const int n = g.n_nodes();
      const ModelParams p = std::string(preset) == "snls1" ? snls1(n, 0.3) : snls2_params(n);
      const EnsembleResult r = integrate_ensemble(perturbed(n, 0.4), g, p, derive_seeds(0, 100), cfg, par);
      out.require(r.summary.failures == 0, std::string(preset) + " " + name + ": 100/100 paths completed (" +
                                               std::to_string(r.summary.failures) + " failures)");
      out.require(r.summary.max_mass_residual <= 1e-12,
                  std::string(preset) + " " + name + ": " + measured("max |sum rho - 1|", r.summary.max_mass_residual, "<= 1e-12"));
    }
  }
  return out;
}

Outcome criterion2(int par) {
  Outcome out;
  const std::vector<std::tuple<std::string, Graph, MadelungState>> cases{
      {"K2", k2(), state({0.3, 0.7}, {0.4, -0.2})}, {"ring-8", ring(8, 1.0), perturbed(8, 0.4)}};
  const int paths = 10;
  for (const auto& [name, g, init] : cases) {
    const ModelParams p = snls1(g.n_nodes(), 0.3);
    const IntegratorConfig coarse = config(1e-3, 1.0);
    const IntegratorConfig fine = config(5e-4, 1.0);
    std::vector<double> dc(paths), df(paths);
    std::atomic<int> failures{0};
    parallel_for(paths, par, [&](int k) {
      const auto [nc, nf] = nested_noise(k, coarse.dt, coarse.n_steps);
      const Trajectory tc = integrate_path(init, g, p, nc, coarse);
      const Trajectory tf = integrate_path(init, g, p, nf, fine);
      if (!tc.ok() || !tf.ok()) {
        ++failures;
        return;
      }
      dc[k] = shifted_energy_drift(tc, g, p);
      df[k] = shifted_energy_drift(tf, g, p);
    });
    out.require(failures == 0, name + ": all paths completed");
    out.require(max_of(dc) <= 1e-5, name + ": " + measured("max relative drift of H0(rho, S + sigma W) at dt = 1e-3", max_of(dc), "<= 1e-5"));
    const double ratio = mean_of(dc) / mean_of(df);
    out.require(ratio >= 3.5 && ratio <= 4.5, name + ": " + measured("drift(dt) / drift(dt/2)", ratio, "in [3.5, 4.5]"));
  }
  return out;
}

Outcome criterion3(int par) {
  Outcome out;
  const Graph g = k2();
  const ModelParams p = snls2_params(2);
  const MadelungState init = state({0.475, 0.525}, {0.05, -0.05});
  const IntegratorConfig cfg = config(1e-3, 1.0);
  const int paths = 100;
  std::vector<double> drift(paths);
  std::atomic<int> failures{0};
  parallel_for(paths, par, [&](int k) {
    const Trajectory tr = integrate_path(init, g, p, sample_brownian(k, cfg.dt, cfg.n_steps), cfg);
    if (!tr.ok()) {
      ++failures;
      return;
    }
    drift[k] = h1_drift(tr, g, p);
  });
  out.require(failures == 0, "100/100 paths completed");
  out.require(max_of(drift) <= 1e-5, measured("max relative drift of K + I/8", max_of(drift), "<= 1e-5"));
  return out;
}

Outcome criterion4(int par) {
  Outcome out;
  const std::vector<std::pair<int, double>> rings{{4, 1.0}, {8, 0.5}, {16, 1.0}};
  for (const auto& [n, dx] : rings) {
    const Graph g = ring(n, dx);
    double worst = 0.0;
    for (Equation eq : {Equation::kSnls1, Equation::kSnls2}) {
      for (int m = 0; m < n; ++m) {
        const NonlinearResidual r = nonlinear_dispersion_residual({m, 0.0}, g, 0.3, eq);
        worst = std::max({worst, r.rho, r.s});
      }
    }
    out.require(worst <= 1e-12, "N = " + std::to_string(n) + ": " + measured("max nonlinear residual", worst, "<= 1e-12"));

    const ModelParams p = snls1(n, 0.3);
    const IntegratorConfig cfg = config(1e-3, 1.0);
    std::vector<double> dev(n);
    std::atomic<int> failures{0};
    parallel_for(n, par, [&](int m) {
      const PlaneWaveSpec spec{m, 0.0};
      const MadelungState init = plane_wave_state(spec, g);
      const double k = wavenumber(spec, g);
      const double mu = frequency(spec, g);
      const Trajectory tr = integrate_path(init, g, p, sample_brownian(1000 + m, cfg.dt, cfg.n_steps), cfg);
      if (!tr.ok()) {
        ++failures;
        return;
      }
      double d = 0.0;
      for (std::size_t q = 0; q < tr.states.size(); ++q) {
        const double t = tr.states[q].t;
        for (int j = 0; j < n; ++j) {
          const double exact = k * g.coords()[j] - mu * t - 0.3 * tr.w[q];
          d = std::max({d, std::abs(tr.states[q].s[j] - exact), std::abs(tr.states[q].rho[j] - init.rho[j])});
        }
      }
      dev[m] = d;
    });
    out.require(failures == 0, "N = " + std::to_string(n) + ": all plane-wave paths completed");
    out.require(max_of(dev) <= 1e-10,
                "N = " + std::to_string(n) + ": " + measured("max |S - (Kx - mu t - sigma W)|, |rho - A^2|", max_of(dev), "<= 1e-10"));
  }
  return out;
}

Outcome criterion5(int) {
  Outcome out;
  const double dx = 0.1;
  const int n = 40;  // mode 10 has K dx = pi/2
  const Graph g = ring(n, dx);
  const LinearStencil st = second_difference_stencil(dx);
  const double r = linear_dispersion_residual(st, {10, 0.0}, g);
  out.require(std::abs(r - 23.370) <= 1e-3, measured("residual at K dx = pi/2", r, "= 23.370 +- 0.001"));
  double smallest = INFINITY;
  int checked = 0;
  for (int m = 0; m < n; ++m) {
    const double kdx = wavenumber({m, 0.0}, g) * dx;
    if (std::abs(kdx) < std::numbers::pi / 4 - 1e-12) continue;
    smallest = std::min(smallest, linear_dispersion_residual(st, {m, 0.0}, g));
    ++checked;
  }
  out.require(smallest > 1e-3, measured("min residual over " + std::to_string(checked) + " modes with |K dx| >= pi/4", smallest, "> 1e-3"));
  return out;
}

Outcome criterion6(int par) {
  Outcome out;
  const Graph g = k2();
  const ModelParams p = snls1(2, 0.3);
  const MadelungState init = state({0.3, 0.7}, {0.4, -0.2});
  const IntegratorConfig coarse = config(1e-3, 1.0);
  const IntegratorConfig fine = config(5e-4, 1.0);
  const int paths = 10;
  std::vector<double> dc(paths), df(paths);
  parallel_for(paths, par, [&](int k) {
    const auto [nc, nf] = nested_noise(k, coarse.dt, coarse.n_steps);
    dc[k] = transverse_check(init, g, p, 1.0, nc, coarse);
    df[k] = transverse_check(init, g, p, 1.0, nf, fine);
  });
  out.require(max_of(dc) <= 5e-6, measured("max |u^alpha - u e^{-i alpha t}| at dt = 1e-3", max_of(dc), "<= 5e-6"));
  const double ratio = mean_of(dc) / mean_of(df);
  out.line(measured("max deviation at dt = 5e-4", max_of(df), ""));
  out.require(ratio >= 3.5 && ratio <= 4.5, measured("deviation(dt) / deviation(dt/2)", ratio, "in [3.5, 4.5] (order 2)"));
  return out;
}

Outcome criterion7(int par) {
  Outcome out;
  const Graph g = k2();
  const ModelParams p = snls1(2, 0.3);
  const MadelungState init = state({0.3, 0.7}, {0.4, -0.2});
  const IntegratorConfig cfg = config(1e-3, 0.5, 1e-13);
  const int paths = 10;
  std::vector<double> err(paths);
  parallel_for(paths, par, [&](int k) {
    err[k] = reversibility_check(init, g, p, sample_brownian(k, cfg.dt, cfg.n_steps), cfg);
  });
  out.require(max_of(err) <= 1e-9, measured("max return error", max_of(err), "<= 1e-9"));
  return out;
}

// Central differences with step h (1 + |x|).
template <class F>
Eigen::VectorXd central_fd(F&& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd y = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x[i]));
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double rel_inf(const Eigen::VectorXd& a, const Eigen::VectorXd& ref) {
  return (a - ref).lpNorm<Eigen::Infinity>() / std::max(ref.lpNorm<Eigen::Infinity>(), 1e-300);
}

Outcome criterion8(int par) {
  Outcome out;
  const int states = 100;
  const ThetaKind kinds[] = {ThetaKind::kAveraged, ThetaKind::kLogarithmic, ThetaKind::kHarmonic};
  std::vector<double> e_fisher(states), e_krho(states), e_ks(states), e_field(states);
  parallel_for(states, par, [&](int k) {
    // State k: counter-based draws keep every state independent of scheduling.
    std::uint64_t c = 0;
    auto u01 = [&] { return 0.5 * (1.0 + std::erf(standard_normal(777 + k, c++) / std::sqrt(2.0))); };
    const int n = 3 + k % 6;
    std::vector<EdgeSpec> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 0.2 + 2.8 * u01()});
    for (int i = 0; i < n; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (u01() < 0.3) edges.push_back({i, j, 0.2 + 2.8 * u01()});
      }
    }
    const Graph g = build_graph(n, edges);
    MadelungState st = uniform_state(n);
    for (int i = 0; i < n; ++i) {
      st.rho[i] = 0.05 + 0.95 * u01();
      st.s[i] = std::numbers::pi * (2.0 * u01() - 1.0);
    }
    st.rho /= st.rho.sum();
    const ThetaKind kind = kinds[k % 3];
    const ThetaKind tilde = kinds[(k / 3) % 3];

    e_fisher[k] = rel_inf(fisher_gradient(st.rho, g, tilde),
                          central_fd([&](const Eigen::VectorXd& r) { return fisher_information(r, g, tilde); }, st.rho));
    const KineticGradient kg = kinetic_gradient(st.rho, st.s, g, kind);
    e_krho[k] = rel_inf(kg.d_rho, central_fd([&](const Eigen::VectorXd& r) { return kinetic_energy(r, st.s, g, kind); }, st.rho));
    e_ks[k] = rel_inf(kg.d_s, central_fd([&](const Eigen::VectorXd& s) { return kinetic_energy(st.rho, s, g, kind); }, st.s));

    ModelParams p = k % 2 == 0 ? snls1_params(n) : snls2_params(n);
    p.theta_kind = kind;
    p.theta_tilde_kind = tilde;
    for (int i = 0; i < n; ++i) {
      p.V[i] = 2.0 * u01() - 1.0;
      p.sigma[i] = u01();
      for (int j = 0; j <= i; ++j) p.W(i, j) = p.W(j, i) = 2.0 * u01() - 1.0;
    }
    p.kappa = u01();
    double worst = 0.0;
    for (Which which : {Which::kH0, Which::kH1}) {
      const VectorField f = hamiltonian_vector_field(st, g, p, which);
      const Eigen::VectorXd dh_drho = central_fd(
          [&](const Eigen::VectorXd& r) {
            MadelungState y = st;
            y.rho = r;
            return hamiltonian(y, g, p, which);
          },
          st.rho);
      const Eigen::VectorXd dh_ds = central_fd(
          [&](const Eigen::VectorXd& s) {
            MadelungState y = st;
            y.s = s;
            return hamiltonian(y, g, p, which);
          },
          st.s);
      Eigen::VectorXd field(2 * n), ref(2 * n);
      field << f.drho, f.ds;
      ref << dh_ds, -dh_drho;
      worst = std::max(worst, rel_inf(field, ref));
    }
    e_field[k] = worst;
  });
  out.require(max_of(e_fisher) <= 1e-6, measured("dI/drho max relative error", max_of(e_fisher), "<= 1e-6"));
  out.require(max_of(e_krho) <= 1e-6, measured("dK/drho max relative error", max_of(e_krho), "<= 1e-6"));
  out.require(max_of(e_ks) <= 1e-6, measured("dK/dS max relative error", max_of(e_ks), "<= 1e-6"));
  out.require(max_of(e_field) <= 1e-6, measured("Hamiltonian field (H0, H1) max relative error", max_of(e_field), "<= 1e-6"));
  return out;
}

// Shared control problem: SNLS1, sigma = 0.2, T = 0.5, 20 steps.
ControlSetup control_setup(const Graph& g, int paths, int par) {
  const int n = g.n_nodes();
  ControlSetup s{g, snls1(n, 0.2), perturbed(n, 0.4), config(0.025, 0.5), derive_seeds(0, paths), par};
  return s;
}

// Time profile with zero mean on every node.
ControlPath profile(const ControlSetup& s, double amp, double phase) {
  ControlPath v{ControlKind::kPotential, Eigen::MatrixXd(s.graph.n_nodes(), s.n_steps())};
  for (int i = 0; i < v.values.rows(); ++i) {
    for (int q = 0; q < v.values.cols(); ++q) {
      v.values(i, q) = amp * std::sin(2.0 * std::numbers::pi * (q + 0.5) / s.n_steps() + phase + 1.3 * i);
    }
  }
  return v;
}

Eigen::MatrixXd direction(std::uint64_t seed, int rows, int cols) {
  Eigen::MatrixXd d(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int q = 0; q < cols; ++q) d(i, q) = standard_normal(seed, static_cast<std::uint64_t>(i * cols + q));
  }
  return d;
}

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

Outcome criterion9(int par) {
  Outcome out;
  for (const auto& [name, g] : std::vector<std::pair<std::string, Graph>>{{"K2", k2()}, {"triangle", triangle()}}) {
    const ControlSetup s = control_setup(g, 10000, par);
    CostSpec cs;
    cs.gamma = 1.0;
    cs.beta = 1e-3;
    cs.beta1 = 0.1;
    cs.f1_paths = terminal_states(profile(s, 0.6, 0.0), s);
    const QuadraticCost cost(cs);
    const ControlPath v = profile(s, 0.3, 1.0);
    const LinearizedEnsemble lin = linearize(v, s);
    const Eigen::MatrixXd gs = gradient_sensitivity(lin, cost, s);
    const BsdeSolution bsde = bsde_solve(lin, cost, s);
    const Eigen::MatrixXd gb = gradient_from_bsde(bsde, lin, cost, s);
    double worst = 0.0, worst_dual = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Eigen::MatrixXd d = direction(500 + k, g.n_nodes(), s.n_steps());
      const double fd = directional_derivative_fd(v, d, cost, s, 1e-4);
      const double a = s.dt() * (gs.array() * d.array()).sum();
      const double b = s.dt() * (gb.array() * d.array()).sum();
      worst = std::max({worst, rel(fd, a), rel(fd, b), rel(a, b)});
      worst_dual = std::max(worst_dual, duality_check(bsde, lin, d, cost, s).rel_error);
    }
    out.require(worst <= 0.02, name + ": " + measured("max pairwise relative discrepancy (FD, sensitivity, BSDE) over 10 directions", worst, "<= 0.02"));
    out.require(worst_dual <= 0.02, name + ": " + measured("max duality relative error", worst_dual, "<= 0.02"));
  }
  return out;
}

Outcome criterion10(int par) {
  Outcome out;
  const ControlSetup s = control_setup(k2(), 1000, par);
  // A zero-mean profile barely moves u(T) over T = 0.5, so the hidden control
  // gets a node-alternating offset as well; |V| <= 0.8 <= alpha.
  ControlPath hidden = profile(s, 0.3, 0.0);
  hidden.values.row(0).array() += 0.5;
  hidden.values.row(1).array() -= 0.5;
  CostSpec cs;
  cs.gamma = 1.0;
  cs.beta = 1e-3;
  cs.f1_paths = terminal_states(hidden, s);
  const QuadraticCost cost(cs);
  PgdOptions opts;
  opts.alpha = 1.0;
  opts.max_iters = 200;
  opts.source = GradientSource::kBsde;
  const PgdResult res = optimize_pgd(cost, ControlPath{ControlKind::kPotential, Eigen::MatrixXd::Zero(2, s.n_steps())}, s, opts);
  bool monotone = true;
  for (std::size_t k = 1; k < res.history.size(); ++k) monotone = monotone && res.history[k].j <= res.history[k - 1].j;
  const double j0 = res.history.front().j;
  const double j = res.history.back().j;
  out.line("iterations = " + std::to_string(res.history.back().iter) + ", J0 = " + g17(j0));
  out.require(j <= 0.1 * j0, measured("J / J0", j / j0, "<= 0.1 within 200 iterations"));
  out.require(monotone, "J non-increasing along the history");
  out.require(res.history.back().stationarity >= -1e-3,
              measured("stationarity residual", res.history.back().stationarity, ">= -1e-3"));
  return out;
}

Outcome criterion11(int par) {
  Outcome out;
  const ControlSetup s = control_setup(k2(), 1000, par);
  const StrongConvergence sc =
      strong_convergence(profile(s, 0.5, 0.0), direction(900, 2, s.n_steps()), {1, 2, 4, 8, 16, 32}, s);
  for (std::size_t k = 0; k < sc.n.size(); ++k) out.line("n = " + std::to_string(sc.n[k]) + ": E sup |du|^2 = " + g17(sc.error[k]));
  out.require(std::abs(sc.slope + 2.0) <= 0.2, measured("log-log slope", sc.slope, "= -2 +- 0.2"));
  return out;
}

using Suite = std::function<Outcome(int)>;

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> all{
      {"mass conservation", criterion1},
      {"constant-sigma energy invariance", criterion2},
      {"SNLS2 conserved H1", criterion3},
      {"dispersion exactness", criterion4},
      {"linear-stencil defect", criterion5},
      {"time-transverse invariance", criterion6},
      {"time reversibility", criterion7},
      {"derivative correctness", criterion8},
      {"gradient triangle", criterion9},
      {"synthetic inverse problem", criterion10},
      {"strong convergence", criterion11},
  };
  return all;
}

Outcome run_guarded(const Suite& suite, int par) {
  try {
    return suite(par);
  } catch (const std::exception& e) {
    Outcome out;
    out.require(false, std::string("exception: ") + e.what());
    return out;
  }
}

Outcome criterion12() {
  Outcome out;
  for (std::size_t k = 0; k < suites().size(); ++k) {
    const Outcome a = run_guarded(suites()[k].second, 1);
    const Outcome b = run_guarded(suites()[k].second, 8);
    out.require(a.report == b.report && a.pass == b.pass,
                "criterion " + std::to_string(k + 1) + ": report identical at parallelism 1 and 8");
  }
  return out;
}

}  // namespace
}  // namespace snls

int main(int argc, char** argv) {
  using namespace snls;
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  int par = 1;
  bool quiet = false;
  app.add_option("--criterion", only, "run one criterion (1-12); all when omitted")->check(CLI::Range(1, 12));
  app.add_option("--parallelism", par, "worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--quiet", quiet, "only the PASS/FAIL lines");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (int k = 1; k <= 12; ++k) {
    if (only != 0 && k != only) continue;
    const std::string name = k == 12 ? "determinism" : suites()[k - 1].first;
    const Outcome o = k == 12 ? criterion12() : run_guarded(suites()[k - 1].second, par);
    std::printf("%s criterion %d (%s)\n", o.pass ? "PASS" : "FAIL", k, name.c_str());
    if (!quiet) std::printf("%s", o.report.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
