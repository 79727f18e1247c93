#include "snls/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "snls/ensemble.hpp"
#include "snls/errors.hpp"
#include "snls/geometry.hpp"

namespace snls::app {

using nlohmann::json;

json default_config() {
  return json::parse(R"({
    "graph": {"n_nodes": 2, "edges": [[0, 1, 1.0]], "omega_tilde": [], "lattice": null},
    "model": {"preset": "snls1", "theta": "averaged", "theta_tilde": "logarithmic",
              "V": 0.0, "W": 0.0, "sigma": 0.0, "kappa": 0.0, "eta": null},
    "integrator": {"dt": 1e-3, "n_steps": 1000, "fixedpoint_tol": 1e-12, "fixedpoint_maxiter": 50,
                   "increment_clip": 6.0, "density_floor": 1e-12},
    "ensemble": {"n_paths": 1, "base_seed": 0},
    "initial": {"rho": null, "s": null, "plane_wave": null, "perturbation": 0.4},
    "simulate": {"write_paths": 1},
    "invariants": {"alpha": 1.0, "mass_tol": 1e-12, "energy_tol": 1e-5, "transverse_tol": 5e-6,
                   "reversibility_tol": 1e-9},
    "dispersion": {"n_nodes": 16, "dx": 1.0, "modes": [], "sigma": 0.0, "equation": "snls1",
                   "stencils": null},
    "problem": {"control": "potential", "gamma": 1.0, "beta1": 0.0, "beta": 1e-3,
                "f1_source": "hidden", "hidden": null, "f1": null, "Z": 0.0, "Z1": null,
                "alpha": 1.0, "T": 0.5, "n_steps": 20, "init": 0.0},
    "solver": {"paths": 100, "seeds": 0, "grad_source": "sensitivity", "step0": 1.0,
               "backtrack": 0.5, "armijo": 1e-4, "max_halvings": 30, "max_iters": 200,
               "tol": 1e-6, "barzilai_borwein": true, "fd_eps": 1e-4, "directions": 10,
               "direction_seed": 1, "bsde_degree": 4, "discrepancy_tol": 0.02},
    "output_dir": "out"
  })");
}

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::kConfig, "'" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void merge_strict(json& base, const json& doc, const std::string& path) {
  if (!doc.is_object()) config_error(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string here = join(path, key);
    if (!base.contains(key)) config_error(here, "unknown key");
    json& slot = base[key];
    if (slot.is_object()) {
      merge_strict(slot, value, here);
    } else {
      slot = value;
    }
  }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  if (!obj.is_object()) config_error(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error(join(path, key), "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) config_error(path, "must be positive");
  return v;
}

double nonnegative(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v < 0.0) config_error(path, "must be nonnegative");
  return v;
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) config_error(path, "expected an integer");
  return j.get<long long>();
}

int count(const json& j, const std::string& path, int lo) {
  const long long v = integer(j, path);
  if (v < lo || v > 1'000'000'000) config_error(path, "must be an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

std::uint64_t seed(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    config_error(path, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) config_error(path, "expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) config_error(path, "expected true or false");
  return j.get<bool>();
}

// Scalar (broadcast) or array of length n.
Eigen::VectorXd vector_value(const json& j, int n, const std::string& path) {
  if (j.is_number()) return Eigen::VectorXd::Constant(n, number(j, path));
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    config_error(path, "expected a number or an array of " + std::to_string(n) + " numbers");
  }
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

// Scalar, per-row constants (length rows), or rows x cols nested arrays.
Eigen::MatrixXd matrix_value(const json& j, int rows, int cols, const std::string& path) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(rows, cols, number(j, path));
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    config_error(path, "expected a number, " + std::to_string(rows) + " numbers or a " +
                           std::to_string(rows) + " x " + std::to_string(cols) + " array");
  }
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    if (j[i].is_number()) {
      m.row(i).setConstant(number(j[i], here));
    } else {
      m.row(i) = vector_value(j[i], cols, here).transpose();
    }
  }
  return m;
}

// Array of n [re, im] pairs.
ComplexState complex_vector(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    config_error(path, "expected an array of " + std::to_string(n) + " [re, im] pairs");
  }
  ComplexState v(n);
  for (int i = 0; i < n; ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) config_error(here, "expected [re, im]");
    v[i] = {number(j[i][0], here + "[0]"), number(j[i][1], here + "[1]")};
  }
  return v;
}

std::vector<EdgeSpec> edge_list(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "expected an array of [i, j, weight]");
  std::vector<EdgeSpec> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string here = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 3) config_error(here, "expected [i, j, weight]");
    out.push_back({count(j[k][0], here + "[0]", 0), count(j[k][1], here + "[1]", 0),
                   number(j[k][2], here + "[2]")});
  }
  return out;
}

template <class F>
auto rethrow_as_config(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    config_error(path, e.what());
  }
}

Graph parse_graph(const json& g) {
  if (!g["lattice"].is_null()) {
    check_keys(g["lattice"], {"n_nodes", "dx"}, "graph.lattice");
    LatticeSpec spec;
    if (!g["lattice"].contains("n_nodes")) config_error("graph.lattice.n_nodes", "required");
    spec.n_nodes = count(g["lattice"]["n_nodes"], "graph.lattice.n_nodes", 1);
    spec.dx = g["lattice"].contains("dx") ? positive(g["lattice"]["dx"], "graph.lattice.dx") : 1.0;
    return rethrow_as_config("graph.lattice", [&] { return build_ring_lattice(spec); });
  }
  const int n = count(g["n_nodes"], "graph.n_nodes", 1);
  const auto edges = edge_list(g["edges"], "graph.edges");
  const auto overrides = edge_list(g["omega_tilde"], "graph.omega_tilde");
  return rethrow_as_config("graph", [&] { return build_graph(n, edges, overrides); });
}

ModelParams parse_model(const json& m, int n) {
  const Preset preset = rethrow_as_config("model.preset", [&] { return parse_preset(text(m["preset"], "model.preset")); });
  ModelParams p = preset == Preset::kSnls2 ? snls2_params(n) : snls1_params(n);
  p.preset = preset;
  p.theta_kind = rethrow_as_config("model.theta", [&] { return parse_theta_kind(text(m["theta"], "model.theta")); });
  p.theta_tilde_kind =
      rethrow_as_config("model.theta_tilde", [&] { return parse_theta_kind(text(m["theta_tilde"], "model.theta_tilde")); });
  p.V = vector_value(m["V"], n, "model.V");
  p.W = m["W"].is_number() ? Eigen::MatrixXd::Constant(n, n, number(m["W"], "model.W"))
                           : matrix_value(m["W"], n, n, "model.W");
  p.sigma = vector_value(m["sigma"], n, "model.sigma");
  p.kappa = number(m["kappa"], "model.kappa");
  if (!m["eta"].is_null()) {
    const Eigen::VectorXd eta = vector_value(m["eta"], 5, "model.eta");
    for (int k = 0; k < 5; ++k) p.eta[k] = eta[k];
  }
  rethrow_as_config("model", [&] { validate(p, n); return 0; });
  return p;
}

IntegratorConfig parse_integrator(const json& j) {
  IntegratorConfig c;
  c.dt = positive(j["dt"], "integrator.dt");
  c.n_steps = count(j["n_steps"], "integrator.n_steps", 1);
  c.fixedpoint_tol = positive(j["fixedpoint_tol"], "integrator.fixedpoint_tol");
  c.fixedpoint_maxiter = count(j["fixedpoint_maxiter"], "integrator.fixedpoint_maxiter", 1);
  c.increment_clip = positive(j["increment_clip"], "integrator.increment_clip");
  c.density_floor = positive(j["density_floor"], "integrator.density_floor");
  rethrow_as_config("integrator", [&] { validate(c); return 0; });
  return c;
}

MadelungState parse_initial(const json& j, const Graph& g) {
  const int n = g.n_nodes();
  if (!j["plane_wave"].is_null()) {
    check_keys(j["plane_wave"], {"mode", "amplitude"}, "initial.plane_wave");
    PlaneWaveSpec spec;
    if (j["plane_wave"].contains("mode")) spec.mode = static_cast<int>(integer(j["plane_wave"]["mode"], "initial.plane_wave.mode"));
    if (j["plane_wave"].contains("amplitude")) spec.amplitude = nonnegative(j["plane_wave"]["amplitude"], "initial.plane_wave.amplitude");
    return rethrow_as_config("initial.plane_wave", [&] { return plane_wave_state(spec, g); });
  }
  MadelungState st = uniform_state(n);
  if (!j["rho"].is_null()) {
    st.rho = vector_value(j["rho"], n, "initial.rho");
    if ((st.rho.array() <= 0.0).any()) config_error("initial.rho", "densities must be positive");
    if (std::abs(st.rho.sum() - 1.0) > 1e-9) config_error("initial.rho", "densities must sum to 1");
    st.rho /= st.rho.sum();
    if (!j["s"].is_null()) st.s = vector_value(j["s"], n, "initial.s");
    return st;
  }
  if (!j["s"].is_null()) config_error("initial.s", "needs initial.rho");
  const double a = nonnegative(j["perturbation"], "initial.perturbation");
  if (a >= 1.0) config_error("initial.perturbation", "must be below 1");
  for (int i = 0; i < n; ++i) {
    st.rho[i] = 1.0 + a * std::sin(2.0 * i + 1.0);
    st.s[i] = a * std::cos(2.0 * i + 1.0);
  }
  st.rho /= st.rho.sum();
  return st;
}

DispersionConfig parse_dispersion(const json& j) {
  DispersionConfig d;
  d.n_nodes = count(j["n_nodes"], "dispersion.n_nodes", 3);
  d.dx = positive(j["dx"], "dispersion.dx");
  if (!j["modes"].is_array()) config_error("dispersion.modes", "expected an array of integers");
  for (std::size_t k = 0; k < j["modes"].size(); ++k) {
    d.modes.push_back(static_cast<int>(integer(j["modes"][k], "dispersion.modes[" + std::to_string(k) + "]")));
  }
  d.sigma = nonnegative(j["sigma"], "dispersion.sigma");
  const std::string eq = text(j["equation"], "dispersion.equation");
  if (eq == "snls1") {
    d.equation = Equation::kSnls1;
  } else if (eq == "snls2") {
    d.equation = Equation::kSnls2;
  } else {
    config_error("dispersion.equation", "expected snls1 or snls2");
  }
  if (j["stencils"].is_null()) {
    d.stencils.push_back(second_difference_stencil(d.dx));
  } else {
    if (!j["stencils"].is_array()) config_error("dispersion.stencils", "expected an array");
    for (std::size_t k = 0; k < j["stencils"].size(); ++k) {
      const std::string here = "dispersion.stencils[" + std::to_string(k) + "]";
      const json& s = j["stencils"][k];
      check_keys(s, {"name", "offsets", "coeffs"}, here);
      if (!s.contains("name") || !s.contains("offsets") || !s.contains("coeffs")) {
        config_error(here, "needs name, offsets and coeffs");
      }
      LinearStencil st;
      st.name = text(s["name"], here + ".name");
      if (!s["offsets"].is_array() || !s["coeffs"].is_array() || s["offsets"].size() != s["coeffs"].size()) {
        config_error(here, "offsets and coeffs must be arrays of equal length");
      }
      for (std::size_t q = 0; q < s["offsets"].size(); ++q) {
        st.offsets.push_back(static_cast<int>(integer(s["offsets"][q], here + ".offsets")));
        st.coeffs.push_back(number(s["coeffs"][q], here + ".coeffs"));
      }
      d.stencils.push_back(std::move(st));
    }
  }
  return d;
}

ProblemConfig parse_problem(const json& j, int n) {
  ProblemConfig p;
  const std::string kind = text(j["control"], "problem.control");
  if (kind == "potential") {
    p.kind = ControlKind::kPotential;
  } else if (kind == "diffusion") {
    p.kind = ControlKind::kDiffusion;
  } else {
    config_error("problem.control", "expected potential or diffusion");
  }
  p.gamma = nonnegative(j["gamma"], "problem.gamma");
  p.beta1 = nonnegative(j["beta1"], "problem.beta1");
  p.beta = nonnegative(j["beta"], "problem.beta");
  p.alpha = positive(j["alpha"], "problem.alpha");
  p.horizon = positive(j["T"], "problem.T");
  p.n_steps = count(j["n_steps"], "problem.n_steps", 1);
  p.f1_source = text(j["f1_source"], "problem.f1_source");
  if (p.f1_source != "hidden" && p.f1_source != "hidden_mean" && p.f1_source != "initial" &&
      p.f1_source != "explicit") {
    config_error("problem.f1_source", "expected hidden, hidden_mean, initial or explicit");
  }
  if (j["hidden"].is_null()) {
    // Default hidden control: a smooth profile inside the box. Potentials get a
    // node-alternating offset so the relative phase at T actually depends on it.
    p.hidden.resize(n, p.n_steps);
    const double offset = p.kind == ControlKind::kPotential ? 0.5 : 0.0;
    for (int i = 0; i < n; ++i) {
      for (int q = 0; q < p.n_steps; ++q) {
        const double sign = i % 2 == 0 ? 1.0 : -1.0;
        p.hidden(i, q) = p.alpha * (offset * sign + 0.3 * std::sin(2.0 * M_PI * (q + 0.5) / p.n_steps + i));
      }
    }
  } else {
    p.hidden = matrix_value(j["hidden"], n, p.n_steps, "problem.hidden");
  }
  if (p.f1_source == "explicit") {
    if (j["f1"].is_null()) config_error("problem.f1", "required when f1_source is explicit");
    p.f1 = complex_vector(j["f1"], n, "problem.f1");
  } else if (!j["f1"].is_null()) {
    config_error("problem.f1", "only used when f1_source is explicit");
  }
  p.z = matrix_value(j["Z"], n, p.n_steps, "problem.Z");
  if (!j["Z1"].is_null()) {
    const ComplexState z1 = complex_vector(j["Z1"], n, "problem.Z1");
    p.z1 = z1.replicate(1, p.n_steps);
  }
  p.init = matrix_value(j["init"], n, p.n_steps, "problem.init");
  return p;
}

SolverConfig parse_solver(const json& j) {
  SolverConfig s;
  s.paths = count(j["paths"], "solver.paths", 1);
  s.seed = seed(j["seeds"], "solver.seeds");
  s.source = rethrow_as_config("solver.grad_source",
                               [&] { return parse_gradient_source(text(j["grad_source"], "solver.grad_source")); });
  s.step0 = positive(j["step0"], "solver.step0");
  s.backtrack = positive(j["backtrack"], "solver.backtrack");
  if (s.backtrack >= 1.0) config_error("solver.backtrack", "must be below 1");
  s.armijo = positive(j["armijo"], "solver.armijo");
  s.max_halvings = count(j["max_halvings"], "solver.max_halvings", 0);
  s.max_iters = count(j["max_iters"], "solver.max_iters", 0);
  s.tol = nonnegative(j["tol"], "solver.tol");
  s.barzilai_borwein = boolean(j["barzilai_borwein"], "solver.barzilai_borwein");
  s.fd_eps = positive(j["fd_eps"], "solver.fd_eps");
  s.directions = count(j["directions"], "solver.directions", 1);
  s.direction_seed = seed(j["direction_seed"], "solver.direction_seed");
  s.bsde_degree = count(j["bsde_degree"], "solver.bsde_degree", 0);
  s.discrepancy_tol = positive(j["discrepancy_tol"], "solver.discrepancy_tol");
  return s;
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::kInvalidArgument, "SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 15]);
  }
  return out;
}

RunConfig build_config(const json& document) {
  json merged = default_config();
  merge_strict(merged, document, "");
  RunConfig cfg;
  cfg.output_dir = text(merged["output_dir"], "output_dir");
  merged.erase("output_dir");
  cfg.effective = merged;
  cfg.hash = sha256_hex(merged.dump());

  check_keys(merged["graph"], {"n_nodes", "edges", "omega_tilde", "lattice"}, "graph");
  cfg.graph = parse_graph(merged["graph"]);
  const int n = cfg.graph.n_nodes();
  cfg.params = parse_model(merged["model"], n);
  cfg.integrator = parse_integrator(merged["integrator"]);
  cfg.n_paths = count(merged["ensemble"]["n_paths"], "ensemble.n_paths", 1);
  cfg.base_seed = seed(merged["ensemble"]["base_seed"], "ensemble.base_seed");
  cfg.initial = parse_initial(merged["initial"], cfg.graph);
  cfg.simulate.write_paths = count(merged["simulate"]["write_paths"], "simulate.write_paths", 0);
  const json& inv = merged["invariants"];
  cfg.invariants.alpha = number(inv["alpha"], "invariants.alpha");
  cfg.invariants.mass_tol = positive(inv["mass_tol"], "invariants.mass_tol");
  cfg.invariants.energy_tol = positive(inv["energy_tol"], "invariants.energy_tol");
  cfg.invariants.transverse_tol = positive(inv["transverse_tol"], "invariants.transverse_tol");
  cfg.invariants.reversibility_tol = positive(inv["reversibility_tol"], "invariants.reversibility_tol");
  cfg.dispersion = parse_dispersion(merged["dispersion"]);
  cfg.problem = parse_problem(merged["problem"], n);
  cfg.solver = parse_solver(merged["solver"]);
  return cfg;
}

RunConfig load_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, std::string("parse error: ") + e.what());
  }
  return build_config(doc);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfig, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str());
}

ControlSetup control_setup(const RunConfig& cfg, int parallelism) {
  ControlSetup s{cfg.graph, cfg.params, cfg.initial, cfg.integrator,
                 derive_seeds(cfg.solver.seed, cfg.solver.paths), parallelism};
  s.cfg.n_steps = cfg.problem.n_steps;
  s.cfg.dt = cfg.problem.horizon / cfg.problem.n_steps;
  return s;
}

CostSpec resolve_cost(const RunConfig& cfg, const ControlSetup& setup) {
  const ProblemConfig& p = cfg.problem;
  CostSpec cs;
  cs.gamma = p.gamma;
  cs.beta1 = p.beta1;
  cs.beta = p.beta;
  cs.alpha = p.alpha;
  cs.z = p.z;
  cs.z1 = p.z1;
  const ControlPath hidden{p.kind, p.hidden};
  if (p.f1_source == "hidden") {
    cs.f1_paths = terminal_states(hidden, setup);
    cs.f1 = mean_state(cs.f1_paths);
  } else if (p.f1_source == "hidden_mean") {
    cs.f1 = mean_state(terminal_states(hidden, setup));
  } else if (p.f1_source == "initial") {
    cs.f1 = madelung_to_complex(setup.init);
  } else {
    cs.f1 = p.f1;
  }
  return cs;
}

}  // namespace snls::app
