#pragma once

#include <array>
#include <span>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/krylov.hpp"
#include "mfg/precond.hpp"

namespace mfg {

/// Running-cost integrand at one node, f(m) = quad m^2 + lin m + offset, with
/// quad, lin >= 0 so that f is nondecreasing on [0, inf). Terminal penalties
/// are folded in by adding their density derivative (weighted by 1/dt) to the
/// same coefficients.
struct CellCost {
  double quad = 0.0;
  double lin = 0.0;
  double offset = 0.0;

  double f(double m) const { return (quad * m + lin) * m + offset; }
  double df(double m) const { return 2.0 * quad * m + lin; }
  /// Antiderivative F(m) = integral of f from 0 to m (the objective term).
  double F(double m) const {
    return ((quad / 3.0 * m + lin / 2.0) * m + offset) * m;
  }
};

struct PointProx {
  double m = 0.0;
  std::array<double, 4> w{0.0, 0.0, 0.0, 0.0};
};

/// Pointwise proximal step of the kinetic term plus cell cost (q' = 2):
/// minimizes |w|^2/(2m) + F(m) + (m - mt)^2/(2 tau) + |w - wt|^2/(2 tau)
/// over m >= 0, w in the sign cone. The momentum solves in closed form,
/// w = P_K(wt) m/(m + tau); the density solves the strictly increasing scalar
/// equation (m - mt)/tau + f(m) - |P_K(wt)|^2 / (2 (m + tau)^2) = 0 on
/// (0, inf), collapsing to (0, 0) when the left side is nonnegative at 0.
PointProx prox_primal_pointwise(double m_tilde,
                                const std::array<double, 4>& w_tilde,
                                double tau, const CellCost& cost);

/// Field-level primal prox. Cell (k, i, j) pairs m at level k+1 with w at
/// level k; the last level uses the terminal cost table.
void prox_primal(const Grid& g, std::span<const CellCost> running,
                 std::span<const CellCost> terminal, double tau,
                 const PrimalState& in, PrimalState& out,
                 const ThreadPool& pool);

/// Dual prox: out = C^T (C C^T)^{-1} (C xhat - sigma d), with d carrying the
/// initial datum. Forms the full right-hand side over time levels 0..nt,
/// eliminates the initial block, solves the reduced system by preconditioned
/// CG, expands, and applies C^T. If feasible_m is given it receives the
/// density part of the constraint projection of xhat/sigma, the nearest
/// point on the affine constraint (exact up to the CG tolerance).
CgReport prox_dual(const Grid& g, double nu, double sigma,
                   std::span<const double> m0, const DualState& xhat,
                   const Preconditioner& P, double cg_tol, int max_iter,
                   DualState& out, const ThreadPool& pool,
                   std::vector<double>* feasible_m = nullptr,
                   double* precond_seconds = nullptr);

}  // namespace mfg
