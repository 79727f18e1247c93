#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "snls/bsde.hpp"
#include "snls/control.hpp"
#include "snls/dispersion.hpp"
#include "snls/graph.hpp"
#include "snls/integrator.hpp"
#include "snls/model.hpp"
#include "snls/optimize.hpp"
#include "snls/state.hpp"

namespace snls::app {

struct SimulateConfig {
  int write_paths = 1;  // trajectory CSVs for the first paths
};

struct InvariantsConfig {
  double alpha = 1.0;
  double mass_tol = 1e-12;
  double energy_tol = 1e-5;
  double transverse_tol = 5e-6;
  double reversibility_tol = 1e-9;
};

struct DispersionConfig {
  int n_nodes = 16;
  double dx = 1.0;
  std::vector<int> modes;  // all 0..N-1 when empty
  double sigma = 0.0;
  Equation equation = Equation::kSnls1;
  std::vector<LinearStencil> stencils;
};

struct ProblemConfig {
  ControlKind kind = ControlKind::kPotential;
  double gamma = 1.0;
  double beta1 = 0.0;
  double beta = 1e-3;
  std::string f1_source = "hidden";  // hidden | hidden_mean | initial | explicit
  Eigen::MatrixXd hidden;            // N x n_steps
  ComplexState f1;                   // explicit target
  Eigen::MatrixXd z;                 // N x n_steps
  Eigen::MatrixXcd z1;               // N x n_steps or empty
  double alpha = 1.0;
  double horizon = 0.5;
  int n_steps = 20;
  Eigen::MatrixXd init;  // initial control, N x n_steps
};

struct SolverConfig {
  int paths = 100;
  std::uint64_t seed = 0;
  GradientSource source = GradientSource::kSensitivity;
  double step0 = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  int max_halvings = 30;
  int max_iters = 200;
  double tol = 1e-6;
  bool barzilai_borwein = true;
  double fd_eps = 1e-4;
  int directions = 10;
  std::uint64_t direction_seed = 1;
  int bsde_degree = 4;
  double discrepancy_tol = 0.02;
};

struct RunConfig {
  nlohmann::json effective;  // defaults merged with the document, output_dir removed
  std::string hash;          // SHA-256 of effective.dump()
  std::string output_dir;
  Graph graph;
  ModelParams params;
  IntegratorConfig integrator;
  int n_paths = 1;
  std::uint64_t base_seed = 0;
  MadelungState initial;
  SimulateConfig simulate;
  InvariantsConfig invariants;
  DispersionConfig dispersion;
  ProblemConfig problem;
  SolverConfig solver;
};

nlohmann::json default_config();

// Errors are ErrorKind::kConfig and name the offending key path or the parse
// position.
RunConfig load_config_file(const std::string& path);
RunConfig load_config_text(const std::string& text);
RunConfig build_config(const nlohmann::json& document);

// Control setup for gradcheck/optimize: problem horizon and step count, solver
// seeds, model and graph from the config.
ControlSetup control_setup(const RunConfig& cfg, int parallelism);

// Cost spec with f1 resolved from problem.f1_source.
CostSpec resolve_cost(const RunConfig& cfg, const ControlSetup& setup);

std::string sha256_hex(const std::string& data);

}  // namespace snls::app
