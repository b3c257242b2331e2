#include "mfg/prox.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mfg {

PointProx prox_primal_pointwise(double m_tilde,
                                const std::array<double, 4>& w_tilde,
                                double tau, const CellCost& cost) {
  if (!(tau > 0)) throw std::invalid_argument("prox: tau must be positive");
  const auto p = project_cone(w_tilde);
  const double p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];

  auto phi = [&](double m) {
    const double mt = m + tau;
    return (m - m_tilde) / tau + cost.f(m) - p2 / (2.0 * mt * mt);
  };
  auto dphi = [&](double m) {
    const double mt = m + tau;
    return 1.0 / tau + cost.df(m) + p2 / (mt * mt * mt);
  };

  PointProx res;
  if (phi(0.0) >= 0.0) return res;  // minimizer pinned at the origin

  // phi is strictly increasing, negative at 0 and positive at hi
  double lo = 0.0;
  double hi =
      m_tilde + tau * (std::abs(cost.f(0.0)) + p2 / (2.0 * tau * tau)) + 1.0;
  for (int grow = 0; phi(hi) < 0.0; ++grow) {
    if (grow >= 100)
      throw std::runtime_error("prox_primal_pointwise: no bracket (f decreasing?)");
    hi *= 2.0;
  }

  double m = (m_tilde > lo && m_tilde < hi) ? m_tilde : 0.5 * hi;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double v = phi(m);
    if (v < 0.0)
      lo = m;
    else
      hi = m;
    const double step = v / dphi(m);
    double next = m - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double diff = std::abs(next - m);
    m = next;
    if (diff <= 1e-12 * std::max(1.0, m)) {
      converged = true;
      break;
    }
  }
  if (!converged && hi - lo > 1e-10 * std::max(1.0, hi))
    throw std::runtime_error("prox_primal_pointwise: root finder stalled");

  res.m = m;
  const double scale = m / (m + tau);
  res.w = {p[0] * scale, p[1] * scale, p[2] * scale, p[3] * scale};
  return res;
}

void prox_primal(const Grid& g, std::span<const CellCost> running,
                 std::span<const CellCost> terminal, double tau,
                 const PrimalState& in, PrimalState& out,
                 const ThreadPool& pool) {
  const std::size_t nxy = g.nxy();
  if (running.size() != nxy || terminal.size() != nxy)
    throw std::invalid_argument("prox_primal: cost table size mismatch");
  if (in.m.size() != g.size() || in.w.size() != 4 * g.size())
    throw std::invalid_argument("prox_primal: state size mismatch");
  out.m.resize(g.size());
  out.w.resize(4 * g.size());
  pool.for_ranges(g.nt, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      const bool last = k + 1 == static_cast<std::size_t>(g.nt);
      const CellCost* costs = last ? terminal.data() : running.data();
      const std::size_t mo = k * nxy;
      const std::size_t wo = k * 4 * nxy;
      for (std::size_t p = 0; p < nxy; ++p) {
        const std::array<double, 4> wt = {
            in.w[wo + p], in.w[wo + nxy + p], in.w[wo + 2 * nxy + p],
            in.w[wo + 3 * nxy + p]};
        const PointProx r =
            prox_primal_pointwise(in.m[mo + p], wt, tau, costs[p]);
        out.m[mo + p] = r.m;
        out.w[wo + p] = r.w[0];
        out.w[wo + nxy + p] = r.w[1];
        out.w[wo + 2 * nxy + p] = r.w[2];
        out.w[wo + 3 * nxy + p] = r.w[3];
      }
    }
  });
}

CgReport prox_dual(const Grid& g, double nu, double sigma,
                   std::span<const double> m0, const DualState& xhat,
                   const Preconditioner& P, double cg_tol, int max_iter,
                   DualState& out, const ThreadPool& pool,
                   std::vector<double>* feasible_m, double* precond_seconds) {
  const std::size_t nxy = g.nxy();
  const std::size_t n = g.size();
  if (m0.size() != nxy) throw std::invalid_argument("prox_dual: m0 size");
  if (xhat.m.size() != n || xhat.w.size() != 4 * n)
    throw std::invalid_argument("prox_dual: state size mismatch");
  if (!(sigma > 0)) throw std::invalid_argument("prox_dual: sigma <= 0");

  // s = C xhat - sigma d over time levels 0..nt; level 0 carries the datum
  std::vector<double> s((g.nt + 1) * nxy);
  apply_C(g, nu, xhat.m, xhat.w, s, pool);
  for (std::size_t p = 0; p < nxy; ++p) s[p] -= sigma * m0[p];

  std::vector<double> b(n), z0(nxy), z(n), zfull((g.nt + 1) * nxy);
  reduce_rhs(g, s, b, z0);

  LinOp A = [&](std::span<const double> in_, std::span<double> out_) {
    apply_bigA(g, nu, in_, out_, pool);
  };
  LinOp M;
  if (precond_seconds) {
    M = [&, precond_seconds](std::span<const double> in_,
                             std::span<double> out_) {
      const auto t0 = std::chrono::steady_clock::now();
      P.apply(in_, out_);
      *precond_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    };
  } else {
    M = [&](std::span<const double> in_, std::span<double> out_) {
      P.apply(in_, out_);
    };
  }
  CgReport rep = pcg(A, M, b, z, cg_tol, max_iter);

  expand_solution(g, z, z0, zfull);
  out.m.resize(n);
  out.w.resize(4 * n);
  apply_C_transpose(g, nu, zfull, out.m, out.w, pool);

  if (feasible_m) {
    feasible_m->resize(n);
    const double is = 1.0 / sigma;
    for (std::size_t p = 0; p < n; ++p)
      (*feasible_m)[p] = is * (xhat.m[p] - out.m[p]);
  }
  return rep;
}

}  // namespace mfg
