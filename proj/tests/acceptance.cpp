// Integration gate: one pass/fail line per numbered criterion.
//
//   acceptance                 run everything
//   acceptance --criteria=1-9  run a range
//   acceptance --criteria=10   run the thread-scaling gate only
//
// Criterion 10 measures real parallel speedup and needs at least 4 physical
// cores; on smaller machines it fails with the measured numbers printed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mfg/analysis.hpp"
#include "mfg/cp.hpp"
#include "mfg/krylov.hpp"
#include "mfg/problems.hpp"
#include "oracles.hpp"

using namespace mfg;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- shared solver runs (criteria 6, 7, 9) --------------------------------

struct RunResult {
  PrimalState sol;
  SolveStats stats;
  double m0_norm = 0.0;
  std::string label;
};

const RunResult& problem1_run(double nu, int l) {
  static std::map<std::pair<double, int>, RunResult> cache;
  const auto key = std::make_pair(nu, l);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const Problem prob = make_problem1(16, 16, 128, nu);
  CpOptions opt;
  opt.gamma = 0.5;
  opt.max_cp_iters = 5000;
  opt.precond.l = l;
  RunResult r;
  std::tie(r.sol, r.stats) = run_cp(prob, opt);
  for (double v : prob.m0) r.m0_norm += v * v;
  r.m0_norm = std::sqrt(r.m0_norm);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "problem1 nx=16 nt=128 nu=%g l=%d", nu, l);
  r.label = buf;
  std::printf("    [run] %s: %zu CP iterations, avg CG %.2f%s\n", buf,
              r.stats.iterations.size(), r.stats.avg_cg(),
              r.stats.converged ? "" : " (NOT converged)");
  return cache.emplace(key, std::move(r)).first->second;
}

std::vector<const RunResult*> trivial_runs() {
  static std::vector<RunResult> cache;
  if (cache.empty()) {
    for (Bc bc : {Bc::Periodic, Bc::Neumann}) {
      const Problem prob = make_trivial(bc, 8, 8, 8, 0.1);
      CpOptions opt;
      opt.cp_tol = 1e-9;
      opt.max_cp_iters = 100;
      RunResult r;
      std::tie(r.sol, r.stats) = run_cp(prob, opt);
      for (double v : prob.m0) r.m0_norm += v * v;
      r.m0_norm = std::sqrt(r.m0_norm);
      r.label = bc == Bc::Periodic ? "trivial periodic" : "trivial neumann";
      cache.push_back(std::move(r));
    }
  }
  std::vector<const RunResult*> out;
  for (const auto& r : cache) out.push_back(&r);
  return out;
}

// ---- criteria -------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  const Grid g = Grid::make(Bc::Periodic, 8, 8, 8, 0, 1, 0, 1, 1.0);
  PrecondSpec spec;
  spec.l = 1;
  spec.nu = 0.0;
  const Preconditioner P(g, spec);
  std::mt19937 rng(1);
  const auto b = oracle::random_vector(rng, g.size());
  std::vector<double> x(g.size());
  const CgReport rep = pcg(
      [&](std::span<const double> in, std::span<double> out) {
        apply_bigA(g, 0.0, in, out);
      },
      [&](std::span<const double> in, std::span<double> out) {
        P.apply(in, out);
      },
      b, x, 1e-10);
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "PCG iterations=%d relres=%.2e runtime=%.3fs", rep.iterations,
                rep.final_relative_residual, secs);
  return {rep.converged && rep.iterations == 1 &&
              rep.final_relative_residual <= 1e-10 && secs < 1.0,
          buf};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  const Grid g = Grid::make(Bc::Periodic, 8, 8, 8, 0, 1, 0, 1, 1.0);
  const int bound = (g.nt - 1) * g.nx * g.ny;  // 448
  bool pass = true;
  std::string detail;
  for (int l : {1, 2}) {
    for (double nu : {1.0, 0.1, 0.01, 0.001}) {
      const auto rep = preconditioned_spectrum(g, nu, l);
      char buf[80];
      std::snprintf(buf, sizeof(buf), "l=%d nu=%g unity=%d; ", l, nu,
                    rep.unity_count);
      detail += buf;
      if (rep.unity_count < bound) pass = false;
    }
  }
  const double secs = seconds_since(t0);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "runtime=%.1fs", secs);
  detail += buf;
  return {pass && secs < 30.0, detail};
}

Outcome criterion3() {
  // unit-spaced grids: the identity is scale-free and the stated tolerance
  // is then two orders above double-precision route disagreement
  std::mt19937 rng(3);
  double worst = 0.0;
  for (Bc bc : {Bc::Periodic, Bc::Neumann}) {
    for (int n : {4, 8, 16}) {
      const int ex = bc == Bc::Periodic ? 0 : 1;
      const Grid g =
          Grid::make(bc, n, n, 1, 0, n + ex, 0, n + ex, 1.0);
      const std::size_t nxy = g.nxy();
      for (int rep = 0; rep < 100; ++rep) {
        const auto s = oracle::random_vector(rng, nxy);
        std::vector<double> bt(4 * nxy), bbt(nxy), ks(nxy);
        apply_B_transpose(g, s, bt);
        apply_B(g, bt, bbt);
        apply_K(g, s, ks);
        double num = 0.0, den = 0.0;
        for (std::size_t p = 0; p < nxy; ++p) {
          const double d = bbt[p] - 2.0 * ks[p];
          num += d * d;
          den += s[p] * s[p];
        }
        worst = std::max(worst, std::sqrt(num / den));
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max ||BBt s - 2Ks||/||s|| = %.2e", worst);
  return {worst <= 1e-13, buf};
}

Outcome criterion4() {
  std::mt19937 rng(4);
  double worst = 0.0;
  for (Bc bc : {Bc::Periodic, Bc::Neumann}) {
    for (double nu : {0.0, 0.01, 1.0}) {
      const Grid g = Grid::make(bc, 16, 16, 8, 0, 1, 0, 1, 1.0);
      PrecondSpec spec;
      spec.l = 2;
      spec.nu = nu;
      const Preconditioner P(g, spec);
      const Eigen::MatrixXd K = oracle::dense_K(g);
      const Eigen::MatrixXd Bm = oracle::dense_B(g);
      const Eigen::MatrixXd Chat = nu * nu * K * K + Bm * Bm.transpose();
      const Eigen::MatrixXd Lhat = oracle::dense_L(g, nu) / g.dt;
      for (int k : {0, 4, 7}) {
        const Eigen::MatrixXd M = Chat + P.time_eigenvalues()[k] * Lhat;
        const auto llt = M.ldlt();
        const auto y = oracle::random_vector(rng, g.nxy());
        const Eigen::Map<const Eigen::VectorXd> ym(y.data(), g.nxy());
        Eigen::VectorXd ref = llt.solve(ym);
        ref += llt.solve(ym - M * ref);  // one refinement step
        std::vector<double> x(g.nxy());
        P.step_solve(k, y, x);
        const Eigen::Map<const Eigen::VectorXd> xm(x.data(), g.nxy());
        worst = std::max(worst, (xm - ref).norm() / ref.norm());
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max relative error = %.2e", worst);
  return {worst <= 1e-10, buf};
}

Outcome criterion5() {
  // pointwise prox against the brute-force objective minimizer
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> um(-2.0, 5.0);
  std::uniform_real_distribution<double> uw(-3.0, 3.0);
  std::uniform_real_distribution<double> uc(-1.5, 1.5);
  std::uniform_real_distribution<double> ulin(0.5, 1000.0);
  std::uniform_real_distribution<double> utgt(0.0, 3.0);
  const double taus[] = {0.1, 1.0, 10.0};
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const double tau = taus[rep % 3];
    const double mt = um(rng);
    const std::array<double, 4> wt = {uw(rng), uw(rng), uw(rng), uw(rng)};
    CellCost cost;
    if (rep % 2 == 0) {
      cost.quad = 0.5;
      cost.offset = uc(rng);
    } else {
      const double s = ulin(rng);  // terminal-penalty cells
      cost.lin = s;
      cost.offset = -s * utgt(rng);
    }
    const auto got = prox_primal_pointwise(mt, wt, tau, cost);
    const auto bf = oracle::brute_force_prox(mt, wt, tau, cost);
    double d = (got.m - bf.m) * (got.m - bf.m);
    for (int c = 0; c < 4; ++c)
      d += (got.w[c] - bf.w[c]) * (got.w[c] - bf.w[c]);
    worst = std::max(worst, std::sqrt(d));
  }
  if (worst > 1e-6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "pointwise deviation %.2e", worst);
    return {false, buf};
  }

  // dual prox against the dense normal-equations formula at 3^3
  const Grid g = Grid::make(Bc::Periodic, 3, 3, 3, 0, 1, 0, 1, 1.0);
  const double nu = 0.1, sigma = 0.8;
  const std::size_t n = g.size();
  PrecondSpec spec;
  spec.l = 1;
  spec.nu = nu;
  const Preconditioner P(g, spec);
  const auto m0 = oracle::random_vector(rng, g.nxy(), 0.2, 1.0);
  DualState xhat = zero_state(g);
  {
    auto mr = oracle::random_vector(rng, n);
    auto wr = oracle::random_vector(rng, 4 * n);
    xhat.m.assign(mr.begin(), mr.end());
    xhat.w.assign(wr.begin(), wr.end());
  }
  DualState out = zero_state(g);
  prox_dual(g, nu, sigma, m0, xhat, P, 1e-13, 10000, out, ThreadPool(1));
  const Eigen::MatrixXd C = oracle::dense_C_reduced(g, nu);
  Eigen::VectorXd state(5 * n);
  state << Eigen::Map<const Eigen::VectorXd>(xhat.m.data(), n),
      Eigen::Map<const Eigen::VectorXd>(xhat.w.data(), 4 * n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (int p = 0; p < g.nxy(); ++p) d(p) = m0[p] / g.dt;
  const Eigen::VectorXd ref =
      C.transpose() *
      (C * C.transpose()).ldlt().solve(C * state - sigma * d);
  double err = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    err += (out.m[p] - ref(p)) * (out.m[p] - ref(p));
  for (std::size_t p = 0; p < 4 * n; ++p)
    err += (out.w[p] - ref(n + p)) * (out.w[p] - ref(n + p));
  err = std::sqrt(err);
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "pointwise deviation %.2e, dual-prox error %.2e", worst, err);
  return {err <= 1e-8, buf};
}

Outcome criterion6() {
  const auto& r1 = problem1_run(0.01, 1);
  const auto& r2 = problem1_run(0.01, 2);
  const int iters1 = static_cast<int>(r1.stats.iterations.size());
  const int iters2 = static_cast<int>(r2.stats.iterations.size());
  const double cg1 = r1.stats.avg_cg();
  const double cg2 = r2.stats.avg_cg();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "CP iters l=1: %d, l=2: %d (target 91 +/- 25%%); avg CG "
                "l=1: %.2f (gate [2,6]), l=2: %.2f (gate [8,22])",
                iters1, iters2, cg1, cg2);
  const bool pass = r1.stats.converged && r2.stats.converged &&
                    iters1 >= 68 && iters1 <= 114 && iters2 >= 68 &&
                    iters2 <= 114 && cg1 >= 2.0 && cg1 <= 6.0 && cg2 >= 8.0 &&
                    cg2 <= 22.0;
  return {pass, buf};
}

Outcome criterion7() {
  const double nus[] = {1.0, 0.1, 0.01, 0.001};
  double cg[4];
  bool pass = true;
  std::string detail = "avg CG (l=1): ";
  for (int i = 0; i < 4; ++i) {
    const auto& r = problem1_run(nus[i], 1);
    cg[i] = r.stats.avg_cg();
    pass = pass && r.stats.converged && cg[i] <= 10.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "nu=%g: %.2f  ", nus[i], cg[i]);
    detail += buf;
  }
  // nonincreasing from nu = 0.1 downward
  if (!(cg[1] >= cg[2] && cg[2] >= cg[3])) pass = false;
  return {pass, detail};
}

Outcome criterion8() {
  bool pass = true;
  std::string detail;
  for (const RunResult* r : trivial_runs()) {
    double minf = 0.0, wmax = 0.0;
    for (double v : r->sol.m) minf = std::max(minf, std::abs(v - 1.0));
    for (double v : r->sol.w) wmax = std::max(wmax, std::abs(v));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s: ||m-1||_inf=%.2e max|w|=%.2e; ",
                  r->label.c_str(), minf, wmax);
    detail += buf;
    pass = pass && r->stats.converged && minf <= 1e-6 && wmax <= 1e-8;
  }
  return {pass, detail};
}

Outcome criterion9() {
  bool pass = true;
  std::string detail;
  std::vector<const RunResult*> runs = trivial_runs();
  runs.push_back(&problem1_run(0.01, 1));
  runs.push_back(&problem1_run(0.01, 2));
  runs.push_back(&problem1_run(1.0, 1));
  runs.push_back(&problem1_run(0.001, 1));
  for (const RunResult* r : runs) {
    if (!r->stats.converged) continue;  // gate applies to converged runs
    const double dev = max_mass_deviation(r->stats.feasible_mass);
    const double bound = 10.0 * r->stats.final_cg_tol * r->m0_norm;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%s: dev=%.2e bound=%.2e; ",
                  r->label.c_str(), dev, bound);
    detail += buf;
    pass = pass && dev <= bound;
  }
  return {pass, detail};
}

Outcome criterion10() {
  const unsigned hw = std::thread::hardware_concurrency();
  std::printf("    [env] hardware_concurrency = %u\n", hw);

  auto bench_run = [](int nx, int nt, int threads) {
    const Problem prob = make_problem1(nx, nx, nt, 0.01);
    CpOptions opt;
    opt.gamma = 0.5;
    opt.max_cp_iters = 100;
    opt.fixed_iterations = true;
    opt.precond.l = 1;
    opt.precond.worker_count = threads;
    const auto [sol, stats] = run_cp(prob, opt);
    (void)sol;
    return std::make_pair(stats.total_seconds, stats.precond_seconds);
  };

  // strong scaling at nx=32, nt=256
  const auto s1 = bench_run(32, 256, 1);
  std::printf("    [strong] 1 thread:  total %.2fs precond %.2fs\n", s1.first,
              s1.second);
  const auto s4 = bench_run(32, 256, 4);
  std::printf("    [strong] 4 threads: total %.2fs precond %.2fs\n", s4.first,
              s4.second);
  const double speedup = s1.second / s4.second;

  // weak scaling, nt proportional to the thread count
  double wmin = 1e300, wmax = 0.0;
  for (int t : {1, 2, 4, 8}) {
    const auto w = bench_run(32, 32 * t, t);
    std::printf("    [weak] %d threads nt=%d: total %.2fs\n", t, 32 * t,
                w.first);
    wmin = std::min(wmin, w.first);
    wmax = std::max(wmax, w.first);
  }
  const double ratio = wmax / wmin;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "precond speedup(4 vs 1)=%.2f (gate >= 2.5); weak max/min="
                "%.2f (gate <= 2.0); cores=%u",
                speedup, ratio, hw);
  return {speedup >= 2.5 && ratio <= 2.0, buf};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  std::string range = "1-10";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--criteria=", 0) == 0) range = arg.substr(11);
  }
  {
    std::size_t dash = range.find('-');
    if (dash == std::string::npos) {
      selected.push_back(std::stoi(range));
    } else {
      const int lo = std::stoi(range.substr(0, dash));
      const int hi = std::stoi(range.substr(dash + 1));
      for (int c = lo; c <= hi; ++c) selected.push_back(c);
    }
  }

  const std::function<Outcome()> criteria[] = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  const char* names[] = {
      "zero-viscosity exactness: PCG converges in one iteration",
      "unity eigenvalue multiplicity >= 448 at 8^3 for all (nu, l)",
      "operator identity B B^T = 2K at the stated tolerance",
      "recursive step solver matches dense factorization at nx=16",
      "prox operators match their independent oracles",
      "crowd-aversion iteration counts within the reference brackets",
      "inner iterations robust and monotone across viscosities",
      "zero-cost problem reaches the flat optimum, both closures",
      "projected density conserves mass within the CG tolerance",
      "thread scaling: strong speedup and weak-runtime bounds"};

  int failures = 0;
  for (int c : selected) {
    if (c < 1 || c > 10) continue;
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = criteria[c - 1]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  criterion %2d (%s): %s  [%.1fs]\n",
                out.pass ? "PASS" : "FAIL", c, names[c - 1],
                out.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
