#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/precond.hpp"
#include "mfg/prox.hpp"

namespace mfg {

/// A fully specified solve instance: discretization, viscosity, initial
/// density, and per-node cost tables (terminal includes the final penalty).
struct Problem {
  std::string name;
  Grid grid;
  double nu = 0.0;
  double gamma = 0.0;
  std::vector<double> m0;          // nxy
  std::vector<CellCost> running;   // nxy
  std::vector<CellCost> terminal;  // nxy
};

struct IterRecord {
  int iter = 0;  // 1-based
  double r = 0.0;
  int cg_iters = 0;
  double cg_relres = 0.0;
  double tau = 0.0, sigma = 0.0, theta = 0.0;
  double t_dual = 0.0, t_primal = 0.0;
};

struct SolveStats {
  std::vector<IterRecord> iterations;
  bool converged = false;
  double final_residual = 0.0;
  double final_cg_tol = 0.0;
  // Projection of the returned primal state onto the affine constraint,
  // taken after the loop with one more preconditioned solve: per-level masses
  // (levels 0..nt, level 0 from the initial datum) and the residual norm.
  std::vector<double> feasible_mass;
  double feasible_constraint_norm = 0.0;
  double dual_seconds = 0.0, primal_seconds = 0.0, precond_seconds = 0.0;
  double total_seconds = 0.0;

  double avg_cg() const;
};

struct CpOptions {
  double gamma = 0.0;
  double cp_tol = -1.0;  // < 0: use dx*dy*dt / 5
  int max_cp_iters = 100000;
  double tau0 = 1.0, sigma0 = 1.0;
  PrecondSpec precond;
  bool fixed_iterations = false;  // run exactly max_cp_iters (benchmarks)
  double cg_tol_fixed = -1.0;  // > 0: bypass the adaptive inner-tolerance rule
  std::function<void(const IterRecord&)> on_iteration;
};

/// theta = 1/sqrt(1 + 2 gamma tau); returns {theta, theta*tau, sigma/theta}.
/// The product tau*sigma is invariant and theta lies in (0, 1].
std::array<double, 3> update_steps(double gamma, double tau, double sigma);

/// r = sqrt(dx dy dt) * ||m_new - m_old||_2.
double stopping_residual(const Grid& g, std::span<const double> m_new,
                         std::span<const double> m_old);

double cp_default_tol(const Grid& g);

/// Accelerated primal-dual loop. Iteration l evaluates the dual prox at
/// x + sigma_l ytilde, the primal prox at y - tau_l x, updates the steps,
/// and extrapolates with the fresh theta. Starts from m replicated over all
/// levels, w = 0, x = 0, ytilde = y. Returns the last primal prox output
/// (m >= 0 and w in the cone hold exactly).
std::pair<PrimalState, SolveStats> run_cp(const Problem& prob,
                                          const CpOptions& opt);

}  // namespace mfg
