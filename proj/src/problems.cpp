#include "mfg/problems.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mfg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double problem1_cost(double x, double y, double m) {
  return 0.5 * (m * m - std::sin(kTwoPi * y) - std::sin(kTwoPi * x) -
                std::cos(2.0 * kTwoPi * x));
}

void problem2_setup(double beta, const Grid& g, std::vector<double>& m0,
                    std::vector<double>& m_bar) {
  if (!(beta > 0)) throw std::invalid_argument("problem2_setup: beta <= 0");
  m0.assign(g.nxy(), 0.0);
  m_bar.assign(g.nxy(), 0.0);
  const double a = 128.0;  // 2^7
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.ny; ++j) {
      const double y = g.y(j);
      m0[i * g.ny + j] =
          3.0 * std::exp(-a * ((x + 0.25) * (x + 0.25) +
                               (y - 0.25) * (y - 0.25)));
      m_bar[i * g.ny + j] =
          3.0 * std::exp(-a * ((x - 0.25) * (x - 0.25) +
                               (y + 0.25) * (y + 0.25)));
    }
  }
}

Problem make_problem1(int nx, int ny, int nt, double nu) {
  Problem p;
  p.name = "problem1";
  // unit torus: the trigonometric frequencies fix the period to 1
  p.grid = Grid::make(Bc::Periodic, nx, ny, nt, 0, 1, 0, 1, 1.0);
  p.nu = nu;
  p.gamma = 0.5;
  p.m0.assign(p.grid.nxy(), 1.0);
  p.running.resize(p.grid.nxy());
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      // f = m^2/2 + c(x, y); c is f at m = 0
      CellCost c;
      c.quad = 0.5;
      c.offset = problem1_cost(p.grid.x(i), p.grid.y(j), 0.0);
      p.running[i * ny + j] = c;
    }
  p.terminal = p.running;  // no terminal penalty
  return p;
}

Problem make_problem2(int nx, int ny, int nt, double nu, double beta_dt) {
  if (!(beta_dt > 0))
    throw std::invalid_argument("make_problem2: beta_dt must be positive");
  Problem p;
  p.name = "problem2";
  p.grid = Grid::make(Bc::Neumann, nx, ny, nt, -0.5, 0.5, -0.5, 0.5, 1.0);
  p.nu = nu;
  p.gamma = 0.05;
  std::vector<double> m_bar;
  const double beta = beta_dt / p.grid.dt;
  problem2_setup(beta, p.grid, p.m0, m_bar);
  p.running.assign(p.grid.nxy(), CellCost{});  // f = 0
  p.terminal.resize(p.grid.nxy());
  // terminal integrand g(m)/dt = (m - mbar) / (beta dt)
  const double s = 1.0 / beta_dt;
  for (int q = 0; q < p.grid.nxy(); ++q) {
    CellCost c;
    c.lin = s;
    c.offset = -s * m_bar[q];
    p.terminal[q] = c;
  }
  return p;
}

Problem make_trivial(Bc bc, int nx, int ny, int nt, double nu) {
  Problem p;
  p.name = "trivial";
  p.grid = Grid::make(bc, nx, ny, nt, 0, 1, 0, 1, 1.0);
  p.nu = nu;
  p.gamma = 0.0;
  p.m0.assign(p.grid.nxy(), 1.0);
  p.running.assign(p.grid.nxy(), CellCost{});
  p.terminal.assign(p.grid.nxy(), CellCost{});
  return p;
}

namespace {

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

}  // namespace

namespace {

ProblemConfig parse_config_json(const nlohmann::json& j);

}  // namespace

ProblemConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  try {
    return parse_config_json(j);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("bad value type: ") + e.what());
  }
}

namespace {

ProblemConfig parse_config_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("top level must be an object");

  static const std::set<std::string> known = {
      "problem", "bc",      "nx",      "ny",      "nt",
      "nu",      "gamma",   "cp_tol",  "beta_dt", "precond",
      "threads", "output_dir"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) bad("unknown key '" + it.key() + "'");

  ProblemConfig c;
  c.problem = j.value("problem", 1);
  if (c.problem < 0 || c.problem > 2) bad("problem must be 0, 1, or 2");

  const Bc default_bc = c.problem == 2 ? Bc::Neumann : Bc::Periodic;
  c.bc = default_bc;
  if (j.contains("bc")) {
    const std::string b = j.at("bc").get<std::string>();
    if (b == "periodic")
      c.bc = Bc::Periodic;
    else if (b == "neumann")
      c.bc = Bc::Neumann;
    else
      bad("bc must be 'periodic' or 'neumann'");
  }
  if (c.problem == 1 && c.bc != Bc::Periodic) bad("problem 1 is periodic");
  if (c.problem == 2 && c.bc != Bc::Neumann) bad("problem 2 needs bc=neumann");

  c.nx = j.value("nx", 16);
  c.ny = j.value("ny", c.nx);
  c.nt = j.value("nt", 8 * c.nx);
  if (c.nx < 1 || c.ny < 1 || c.nt < 1) bad("grid sizes must be positive");

  c.nu = j.value("nu", 0.01);
  if (c.nu < 0) bad("nu must be nonnegative");
  c.gamma = j.value("gamma", c.problem == 2   ? 0.05
                             : c.problem == 1 ? 0.5
                                              : 0.0);
  if (c.gamma < 0) bad("gamma must be nonnegative");
  if (j.contains("cp_tol")) {
    c.cp_tol = j.at("cp_tol").get<double>();
    if (!(*c.cp_tol > 0)) bad("cp_tol must be positive");
  }
  c.beta_dt = j.value("beta_dt", 1e-5);
  if (!(c.beta_dt > 0)) bad("beta_dt must be positive");

  if (j.contains("precond")) {
    const auto& pj = j.at("precond");
    if (!pj.is_object()) bad("precond must be an object");
    for (auto it = pj.begin(); it != pj.end(); ++it)
      if (it.key() != "l" && it.key() != "step_solver")
        bad("unknown key 'precond." + it.key() + "'");
    c.precond.l = pj.value("l", 1);
    if (c.precond.l != 1 && c.precond.l != 2) bad("precond.l must be 1 or 2");
    if (pj.contains("step_solver")) {
      const std::string s = pj.at("step_solver").get<std::string>();
      if (s == "recursive")
        c.precond.step_solver = StepSolver::Recursive;
      else if (s == "dense")
        c.precond.step_solver = StepSolver::DenseFactor;
      else
        bad("precond.step_solver must be 'recursive' or 'dense'");
    }
  }
  c.threads = j.value("threads", 1);
  if (c.threads < 1) bad("threads must be >= 1");
  c.output_dir = j.value("output_dir", std::string("out"));
  return c;
}

}  // namespace

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Problem build_problem(const ProblemConfig& c) {
  switch (c.problem) {
    case 1:
      return make_problem1(c.nx, c.ny, c.nt, c.nu);
    case 2:
      return make_problem2(c.nx, c.ny, c.nt, c.nu, c.beta_dt);
    default:
      return make_trivial(c.bc, c.nx, c.ny, c.nt, c.nu);
  }
}

CpOptions build_options(const ProblemConfig& c) {
  CpOptions o;
  o.gamma = c.gamma;
  if (c.cp_tol) o.cp_tol = *c.cp_tol;
  o.precond.l = c.precond.l;
  o.precond.step_solver = c.precond.step_solver;
  o.precond.worker_count = c.threads;
  return o;
}

}  // namespace mfg
