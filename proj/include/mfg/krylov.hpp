#pragma once

#include <functional>
#include <span>

namespace mfg {

struct CgReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
};

using LinOp = std::function<void(std::span<const double>, std::span<double>)>;

/// Preconditioned conjugate gradients for SPD matvec and SPD preconditioner.
/// Starts from x = 0, stops when ||b - A x|| / ||b|| <= tol. A zero right-hand
/// side returns x = 0 immediately. max_iter <= 0 picks 10 * dim. Non-finite
/// values in b or produced during the recurrences raise std::runtime_error;
/// hitting max_iter returns the best iterate with converged = false.
CgReport pcg(const LinOp& matvec, const LinOp& precond,
             std::span<const double> b, std::span<double> x, double tol,
             int max_iter = -1);

/// Inner tolerance rule driven by the outer residual r:
/// min(1e-2, max(1e-6, 1e-2 * r)).
double cg_tolerance(double r);

}  // namespace mfg
