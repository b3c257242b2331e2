#include "mfg/cp.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mfg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

double SolveStats::avg_cg() const {
  if (iterations.empty()) return 0.0;
  double s = 0.0;
  for (const auto& it : iterations) s += it.cg_iters;
  return s / iterations.size();
}

std::array<double, 3> update_steps(double gamma, double tau, double sigma) {
  if (!(tau > 0) || !(sigma > 0))
    throw std::invalid_argument("update_steps: steps must be positive");
  if (gamma < 0) throw std::invalid_argument("update_steps: gamma < 0");
  const double theta = 1.0 / std::sqrt(1.0 + 2.0 * gamma * tau);
  return {theta, theta * tau, sigma / theta};
}

double stopping_residual(const Grid& g, std::span<const double> m_new,
                         std::span<const double> m_old) {
  if (m_new.size() != m_old.size())
    throw std::invalid_argument("stopping_residual: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < m_new.size(); ++i) {
    const double d = m_new[i] - m_old[i];
    s += d * d;
  }
  return std::sqrt(g.dx * g.dy * g.dt * s);
}

double cp_default_tol(const Grid& g) { return g.dx * g.dy * g.dt / 5.0; }

std::pair<PrimalState, SolveStats> run_cp(const Problem& prob,
                                          const CpOptions& opt) {
  const Grid& g = prob.grid;
  const std::size_t n = g.size();
  const std::size_t nxy = g.nxy();
  if (prob.m0.size() != nxy || prob.running.size() != nxy ||
      prob.terminal.size() != nxy)
    throw std::invalid_argument("run_cp: problem tables sized wrong");

  PrecondSpec pspec = opt.precond;
  pspec.nu = prob.nu;
  const Preconditioner P(g, pspec);
  const ThreadPool pool(pspec.worker_count);
  const double cp_tol = opt.cp_tol >= 0 ? opt.cp_tol : cp_default_tol(g);
  const int cg_max = 10 * static_cast<int>(n);

  // m replicated from the initial datum, w = 0, dual at 0, ytilde = y
  PrimalState y = zero_state(g);
  for (int k = 0; k < g.nt; ++k)
    std::copy(prob.m0.begin(), prob.m0.end(), y.m.begin() + k * nxy);
  PrimalState y_new = zero_state(g);
  PrimalState ytilde = y;
  DualState x = zero_state(g);
  DualState v = zero_state(g);

  SolveStats stats;
  const auto t_start = Clock::now();
  double tau = opt.tau0, sigma = opt.sigma0;
  double r = -1.0;  // previous residual; first iteration uses tol 1e-2
  double cg_tol = opt.cg_tol_fixed > 0 ? opt.cg_tol_fixed : 1e-2;
  std::vector<double> feasible_m;

  for (int iter = 1; iter <= opt.max_cp_iters; ++iter) {
    IterRecord rec;
    rec.iter = iter;
    rec.tau = tau;
    rec.sigma = sigma;

    // dual step at x + sigma * ytilde
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < n; ++i) v.m[i] = x.m[i] + sigma * ytilde.m[i];
    for (std::size_t i = 0; i < 4 * n; ++i)
      v.w[i] = x.w[i] + sigma * ytilde.w[i];
    const CgReport cg = prox_dual(g, prob.nu, sigma, prob.m0, v, P, cg_tol,
                                  cg_max, x, pool, nullptr,
                                  &stats.precond_seconds);
    if (!cg.converged)
      throw std::runtime_error("run_cp: inner CG failed at iteration " +
                               std::to_string(iter));
    rec.cg_iters = cg.iterations;
    rec.cg_relres = cg.final_relative_residual;
    rec.t_dual = seconds_since(t0);
    stats.dual_seconds += rec.t_dual;

    // primal step at y - tau * x
    t0 = Clock::now();
    for (std::size_t i = 0; i < n; ++i) v.m[i] = y.m[i] - tau * x.m[i];
    for (std::size_t i = 0; i < 4 * n; ++i) v.w[i] = y.w[i] - tau * x.w[i];
    prox_primal(g, prob.running, prob.terminal, tau, v, y_new, pool);
    rec.t_primal = seconds_since(t0);
    stats.primal_seconds += rec.t_primal;

    const auto [theta, tau_next, sigma_next] =
        update_steps(opt.gamma, tau, sigma);
    rec.theta = theta;
    for (std::size_t i = 0; i < n; ++i)
      ytilde.m[i] = y_new.m[i] + theta * (y_new.m[i] - y.m[i]);
    for (std::size_t i = 0; i < 4 * n; ++i)
      ytilde.w[i] = y_new.w[i] + theta * (y_new.w[i] - y.w[i]);

    r = stopping_residual(g, y_new.m, y.m);
    rec.r = r;
    std::swap(y, y_new);
    tau = tau_next;
    sigma = sigma_next;
    if (opt.cg_tol_fixed <= 0) cg_tol = cg_tolerance(r);

    stats.iterations.push_back(rec);
    if (opt.on_iteration) opt.on_iteration(rec);
    if (!opt.fixed_iterations && r <= cp_tol) {
      stats.converged = true;
      break;
    }
  }
  if (opt.fixed_iterations) stats.converged = true;
  stats.final_residual = r;
  stats.final_cg_tol = cg_tol;

  // project the returned state onto the constraint for the mass audit
  {
    DualState proj = zero_state(g);
    const CgReport cg = prox_dual(g, prob.nu, 1.0, prob.m0, y, P, cg_tol,
                                  cg_max, proj, pool, &feasible_m,
                                  &stats.precond_seconds);
    (void)cg;
    stats.feasible_mass.assign(g.nt + 1, 0.0);
    for (std::size_t p = 0; p < nxy; ++p) stats.feasible_mass[0] += prob.m0[p];
    for (int k = 0; k < g.nt; ++k) {
      double s = 0.0;
      const double* mk = feasible_m.data() + static_cast<std::size_t>(k) * nxy;
      for (std::size_t p = 0; p < nxy; ++p) s += mk[p];
      stats.feasible_mass[k + 1] = s;
    }
    std::vector<double> w_feas(4 * n);
    for (std::size_t i = 0; i < 4 * n; ++i) w_feas[i] = y.w[i] - proj.w[i];
    std::vector<double> res(n);
    constraint_residual(g, prob.nu, prob.m0, feasible_m, w_feas, res);
    double s = 0.0;
    for (double vv : res) s += vv * vv;
    stats.feasible_constraint_norm = std::sqrt(s);
  }

  stats.total_seconds = seconds_since(t_start);
  return {std::move(y), std::move(stats)};
}

}  // namespace mfg
