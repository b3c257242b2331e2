#include "mfg/precond.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mfg {

struct Preconditioner::DenseFactors {
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt;  // one per time step
};

namespace {

TransformPlan spatial_plan(Bc bc, int n) {
  return TransformPlan::make(
      bc == Bc::Periodic ? TransformKind::Rdft : TransformKind::Dct2, n);
}

}  // namespace

Preconditioner::Preconditioner(const Grid& g, const PrecondSpec& spec)
    : grid_(g),
      spec_(spec),
      pool_(spec.worker_count),
      time_plan_(TransformPlan::make(
          spec.l == 1 ? TransformKind::Dct8 : TransformKind::Dst1, g.nt)),
      plan_x_(spatial_plan(g.bc, g.nx)),
      plan_y_(spatial_plan(g.bc, g.ny)),
      lambda_(dtt_eigenvalues(g.nt, spec.l)) {
  if (spec.l != 1 && spec.l != 2)
    throw std::invalid_argument("PrecondSpec: l must be 1 or 2");
  if (spec.nu < 0)
    throw std::invalid_argument("PrecondSpec: nu must be nonnegative");

  const int nx = g.nx, ny = g.ny, nt = g.nt;
  const std::size_t nxy = g.nxy();
  const double nu = spec.nu;
  const double idt = 1.0 / g.dt;

  if (spec.step_solver == StepSolver::Recursive) {
    // S_k = nu^2 R.^2 + 2R + (nu lambda_k / dt) R + lambda_k / dt^2 with R
    // tiling the scaled axis eigenvalues in transform slot order.
    const auto& ex = plan_x_.eigenvalues();
    const auto& ey = plan_y_.eigenvalues();
    const double sx = 1.0 / (g.dx * g.dx), sy = 1.0 / (g.dy * g.dy);
    step_diag_.assign(static_cast<std::size_t>(nt) * nxy, 0.0);
    for (int k = 0; k < nt; ++k) {
      const double lk = lambda_[k];
      double* S = step_diag_.data() + static_cast<std::size_t>(k) * nxy;
      for (int i = 0; i < nx; ++i) {
        const double rx = sx * ex[i];
        for (int j = 0; j < ny; ++j) {
          const double r = rx + sy * ey[j];
          const double s = nu * nu * r * r + 2.0 * r + nu * lk * idt * r +
                           lk * idt * idt;
          if (!(s > 0.0))
            throw std::runtime_error(
                "Preconditioner: nonpositive step diagonal entry");
          S[i * ny + j] = s;
        }
      }
    }
  } else {
    // Assemble Chat = nu^2 K^2 + 2K and Lhat densely once, then factor
    // Chat + lambda_k Lhat per time step.
    auto factors = std::make_shared<DenseFactors>();
    Eigen::MatrixXd Kd(nxy, nxy);
    std::vector<double> e(nxy, 0.0), col(nxy);
    for (std::size_t c = 0; c < nxy; ++c) {
      e[c] = 1.0;
      apply_K(g, e, col);
      e[c] = 0.0;
      for (std::size_t r = 0; r < nxy; ++r) Kd(r, c) = col[r];
    }
    const Eigen::MatrixXd K2 = Kd * Kd;
    const Eigen::MatrixXd Chat = nu * nu * K2 + 2.0 * Kd;
    const Eigen::MatrixXd Lhat =
        idt * (nu * Kd +
               idt * Eigen::MatrixXd::Identity(nxy, nxy));
    factors->llt.reserve(nt);
    for (int k = 0; k < nt; ++k) {
      Eigen::MatrixXd M = Chat + lambda_[k] * Lhat;
      factors->llt.emplace_back(M);
      if (factors->llt.back().info() != Eigen::Success)
        throw std::runtime_error(
            "Preconditioner: dense factorization failed (singular step)");
    }
    dense_ = std::move(factors);
  }
}

void Preconditioner::step_solve_recursive(int k, const double* y, double* x,
                                          double* t1, double* t2) const {
  const int nx = grid_.nx, ny = grid_.ny;
  const double* S = step_diag_.data() + static_cast<std::size_t>(k) * grid_.nxy();
  plan_y_.forward_inner(y, t1, nx, 0, nx);
  plan_x_.forward_outer(t1, t2, ny, 0, ny);
  for (int p = 0; p < nx * ny; ++p) t2[p] /= S[p];
  plan_x_.inverse_outer(t2, t1, ny, 0, ny);
  plan_y_.inverse_inner(t1, x, nx, 0, nx);
}

void Preconditioner::step_solve_dense(int k, const double* y, double* x) const {
  const std::size_t nxy = grid_.nxy();
  Eigen::Map<const Eigen::VectorXd> ym(y, nxy);
  Eigen::Map<Eigen::VectorXd> xm(x, nxy);
  xm = dense_->llt[k].solve(ym);
}

void Preconditioner::step_solve(int k, std::span<const double> y,
                                std::span<double> x) const {
  const std::size_t nxy = grid_.nxy();
  if (k < 0 || k >= grid_.nt)
    throw std::invalid_argument("step_solve: time step out of range");
  if (y.size() != nxy || x.size() != nxy)
    throw std::invalid_argument("step_solve: size mismatch");
  if (spec_.step_solver == StepSolver::Recursive) {
    std::vector<double> t1(nxy), t2(nxy);
    step_solve_recursive(k, y.data(), x.data(), t1.data(), t2.data());
  } else {
    step_solve_dense(k, y.data(), x.data());
  }
}

void Preconditioner::apply(std::span<const double> y,
                           std::span<double> out) const {
  const std::size_t n = grid_.size();
  const std::size_t nxy = grid_.nxy();
  const int nt = grid_.nt;
  if (y.size() != n || out.size() != n)
    throw std::invalid_argument("Preconditioner::apply: size mismatch");

  std::vector<double> yt(n), xt(n);
  // time transform columnwise over the (nt x nxy) layout, spatial chunks
  pool_.for_ranges(nxy, [&](std::size_t cb, std::size_t ce) {
    time_plan_.forward_outer(y.data(), yt.data(), nxy, cb, ce);
  });
  // independent per-step solves
  pool_.for_ranges(nt, [&](std::size_t kb, std::size_t ke) {
    if (spec_.step_solver == StepSolver::Recursive) {
      std::vector<double> t1(nxy), t2(nxy);
      for (std::size_t k = kb; k < ke; ++k)
        step_solve_recursive(static_cast<int>(k), yt.data() + k * nxy,
                             xt.data() + k * nxy, t1.data(), t2.data());
    } else {
      for (std::size_t k = kb; k < ke; ++k)
        step_solve_dense(static_cast<int>(k), yt.data() + k * nxy,
                         xt.data() + k * nxy);
    }
  });
  pool_.for_ranges(nxy, [&](std::size_t cb, std::size_t ce) {
    time_plan_.inverse_outer(xt.data(), out.data(), nxy, cb, ce);
  });
}

void zero_visc_exact_solve(const Grid& g, double nu, std::span<const double> b,
                           std::span<double> x) {
  if (nu != 0.0)
    throw std::invalid_argument("zero_visc_exact_solve: requires nu == 0");
  if (b.size() != g.size() || x.size() != g.size())
    throw std::invalid_argument("zero_visc_exact_solve: size mismatch");

  // At nu = 0 the system is the Kronecker sum Dtt(1)/dt^2 + 2K, a shifted
  // 3-D Poisson problem: one diagonalization in every axis solves it.
  const int nt = g.nt, nx = g.nx, ny = g.ny;
  const std::size_t nxy = g.nxy();
  const auto vt = TransformPlan::make(TransformKind::Dct8, nt);
  const auto hx = TransformPlan::make(
      g.bc == Bc::Periodic ? TransformKind::Rdft : TransformKind::Dct2, nx);
  const auto gy = TransformPlan::make(
      g.bc == Bc::Periodic ? TransformKind::Rdft : TransformKind::Dct2, ny);
  const double idt2 = 1.0 / (g.dt * g.dt);
  const double sx = 1.0 / (g.dx * g.dx), sy = 1.0 / (g.dy * g.dy);

  std::vector<double> a(g.size()), t1(nxy), t2(nxy);
  vt.forward_outer(b.data(), a.data(), nxy, 0, nxy);
  for (int k = 0; k < nt; ++k) {
    double* ak = a.data() + static_cast<std::size_t>(k) * nxy;
    gy.forward_inner(ak, t1.data(), nx, 0, nx);
    hx.forward_outer(t1.data(), t2.data(), ny, 0, ny);
    const double lt = vt.eigenvalues()[k] * idt2;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        t2[i * ny + j] /=
            lt + 2.0 * (sx * hx.eigenvalues()[i] + sy * gy.eigenvalues()[j]);
    hx.inverse_outer(t2.data(), t1.data(), ny, 0, ny);
    gy.inverse_inner(t1.data(), ak, nx, 0, nx);
  }
  vt.inverse_outer(a.data(), x.data(), nxy, 0, nxy);
}

}  // namespace mfg
