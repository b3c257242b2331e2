#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfg/cp.hpp"
#include "mfg/grid.hpp"

namespace mfg {

/// Crowd-aversion running cost of the periodic test problem.
double problem1_cost(double x, double y, double m);

/// Gaussian initial and target densities of the Neumann test problem,
/// sampled at the interior nodes.
void problem2_setup(double beta, const Grid& g, std::vector<double>& m0,
                    std::vector<double>& m_bar);

Problem make_problem1(int nx, int ny, int nt, double nu);
Problem make_problem2(int nx, int ny, int nt, double nu, double beta_dt);
/// Zero-cost instance (f = 0, g = 0, m0 = 1): the optimum is the flat density
/// with zero momentum. Problem id 0 in configs.
Problem make_trivial(Bc bc, int nx, int ny, int nt, double nu);

struct ProblemConfig {
  int problem = 1;  // 0 trivial, 1 periodic crowd aversion, 2 Neumann target
  Bc bc = Bc::Periodic;
  int nx = 16, ny = 16, nt = 128;
  double nu = 0.01;
  double gamma = 0.5;
  std::optional<double> cp_tol;   // default dx*dy*dt/5
  double beta_dt = 1e-5;          // problem 2 terminal weight, beta * dt
  PrecondSpec precond;            // l = 1, Recursive unless overridden
  int threads = 1;
  std::string output_dir = "out";
};

/// Parse and validate a JSON config. Unknown keys, wrong types, and invalid
/// ranges raise std::invalid_argument with a descriptive message. Defaults:
/// ny = nx, nt = 8 nx, bc and gamma from the problem id.
ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config_text(const std::string& text);

Problem build_problem(const ProblemConfig& c);
CpOptions build_options(const ProblemConfig& c);

}  // namespace mfg
