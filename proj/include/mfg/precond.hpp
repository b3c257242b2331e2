#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/transforms.hpp"

namespace mfg {

enum class StepSolver { Recursive, DenseFactor };

struct PrecondSpec {
  int l = 1;  // 1: DCT-VIII time transform, 2: DST-I
  StepSolver step_solver = StepSolver::Recursive;
  double nu = 0.0;
  int worker_count = 1;
};

/// Parallel-in-time preconditioner: block-diagonalizes the space-time normal
/// matrix along the time axis, P = I (x) Chat + Dtt(l) (x) Lhat, and solves
/// the nt decoupled systems (Chat + lambda_k Lhat) x_k = y_k per time step.
///
/// P differs from the full matrix only in the first diagonal block, so the
/// preconditioned spectrum clusters at 1 with at most nx*ny outliers; with
/// l = 1 and nu = 0 it is the exact inverse. Symmetric positive definite.
///
/// Transform tables and step-solver data are immutable after construction;
/// apply() is internally parallel over worker_count but externally pure, and
/// its output is bitwise independent of the worker count.
class Preconditioner {
public:
  Preconditioner(const Grid& g, const PrecondSpec& spec);

  const Grid& grid() const { return grid_; }
  const PrecondSpec& spec() const { return spec_; }
  const std::vector<double>& time_eigenvalues() const { return lambda_; }

  /// out = P^{-1} y over the full space-time vector.
  void apply(std::span<const double> y, std::span<double> out) const;

  /// Single per-time-step solve (Chat + lambda_k Lhat) x = y, k in 0..nt-1.
  void step_solve(int k, std::span<const double> y,
                  std::span<double> x) const;

private:
  void step_solve_recursive(int k, const double* y, double* x, double* t1,
                            double* t2) const;
  void step_solve_dense(int k, const double* y, double* x) const;

  Grid grid_;
  PrecondSpec spec_;
  ThreadPool pool_;
  TransformPlan time_plan_;
  TransformPlan plan_x_, plan_y_;
  std::vector<double> lambda_;     // time eigenvalues, one per step
  std::vector<double> step_diag_;  // Recursive: nt x nxy slot-ordered tables
  struct DenseFactors;
  std::shared_ptr<const DenseFactors> dense_;  // DenseFactor: one LLT per step
};

/// Direct solve of the nu = 0 space-time system by full 3-D diagonalization
/// (the l = 1 preconditioner is exact there). Throws unless nu == 0.
void zero_visc_exact_solve(const Grid& g, double nu, std::span<const double> b,
                           std::span<double> x);

}  // namespace mfg
