#include "mfg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mfg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double cg_tolerance(double r) {
  if (r < 0) throw std::invalid_argument("cg_tolerance: negative residual");
  return std::min(1e-2, std::max(1e-6, 1e-2 * r));
}

CgReport pcg(const LinOp& matvec, const LinOp& precond,
             std::span<const double> b, std::span<double> x, double tol,
             int max_iter) {
  const std::size_t n = b.size();
  if (x.size() != n) throw std::invalid_argument("pcg: size mismatch");
  if (max_iter <= 0) max_iter = 10 * static_cast<int>(n);

  CgReport rep;
  std::fill(x.begin(), x.end(), 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (!std::isfinite(bnorm)) throw std::runtime_error("pcg: non-finite rhs");
  if (bnorm == 0.0) {
    rep.converged = true;
    return rep;
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), Ap(n);
  precond(r, z);
  std::copy(z.begin(), z.end(), p.begin());
  double rz = dot(r, z);

  for (int it = 0; it < max_iter; ++it) {
    matvec(p, Ap);
    const double pAp = dot(p, Ap);
    if (!std::isfinite(pAp) || pAp <= 0.0)
      throw std::runtime_error("pcg: matvec lost positive definiteness");
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rep.iterations = it + 1;
    const double rnorm = std::sqrt(dot(r, r));
    if (!std::isfinite(rnorm))
      throw std::runtime_error("pcg: non-finite residual");
    rep.final_relative_residual = rnorm / bnorm;
    if (rep.final_relative_residual <= tol) {
      rep.converged = true;
      return rep;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.converged = false;
  return rep;
}

}  // namespace mfg
