// Command-line driver: solve runs with CSV/JSON artifacts, desk-scale
// spectrum reports, and thread-scaling benchmarks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfg/analysis.hpp"
#include "mfg/cp.hpp"
#include "mfg/io.hpp"
#include "mfg/problems.hpp"
#include "mfg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

json config_echo(const mfg::ProblemConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["bc"] = c.bc == mfg::Bc::Periodic ? "periodic" : "neumann";
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  j["nt"] = c.nt;
  j["nu"] = c.nu;
  j["gamma"] = c.gamma;
  if (c.cp_tol) j["cp_tol"] = *c.cp_tol;
  j["beta_dt"] = c.beta_dt;
  j["precond"]["l"] = c.precond.l;
  j["precond"]["step_solver"] =
      c.precond.step_solver == mfg::StepSolver::Recursive ? "recursive"
                                                          : "dense";
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

std::vector<double> parse_fractions(const std::string& s) {
  std::vector<double> fr;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double f = std::stod(item);
    if (f < 0.0 || f > 1.0)
      throw std::invalid_argument("snapshot fraction out of [0,1]");
    fr.push_back(f);
  }
  return fr;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stoi(item));
  return v;
}

int cmd_solve(const std::string& config_path, int threads_override,
              std::string out_dir, int max_iters,
              const std::string& snapshots) {
  mfg::ProblemConfig cfg;
  std::vector<double> fractions;
  try {
    cfg = mfg::load_config(config_path);
    fractions = parse_fractions(snapshots);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (threads_override > 0) cfg.threads = threads_override;
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  const mfg::Problem prob = mfg::build_problem(cfg);
  mfg::CpOptions opt = mfg::build_options(cfg);
  if (max_iters > 0) opt.max_cp_iters = max_iters;
  opt.on_iteration = [](const mfg::IterRecord& it) {
    if (it.iter % 25 == 0)
      std::fprintf(stderr, "  iter %5d  r %.3e  cg %d\n", it.iter, it.r,
                   it.cg_iters);
  };

  std::cout << "solving " << prob.name << " nx=" << prob.grid.nx
            << " ny=" << prob.grid.ny << " nt=" << prob.grid.nt
            << " nu=" << prob.nu << " l=" << opt.precond.l
            << " threads=" << cfg.threads << "\n";

  mfg::PrimalState sol;
  mfg::SolveStats stats;
  bool solver_threw = false;
  std::string solver_error;
  try {
    std::tie(sol, stats) = mfg::run_cp(prob, opt);
  } catch (const std::exception& e) {
    solver_threw = true;
    solver_error = e.what();
  }

  fs::create_directories(cfg.output_dir);
  json manifest;
  manifest["version"] = mfg::kVersion;
  manifest["config"] = config_echo(cfg);
  manifest["threads"] = cfg.threads;
  json files = json::array();

  auto record_file = [&](const std::string& name) {
    json f;
    f["name"] = name;
    f["exists"] = fs::exists(fs::path(cfg.output_dir) / name);
    files.push_back(f);
  };

  if (!solver_threw) {
    const std::string stats_path =
        (fs::path(cfg.output_dir) / "stats.csv").string();
    mfg::io::write_stats_csv(stats_path, stats);
    record_file("stats.csv");

    const int nxy = prob.grid.nxy();
    for (double f : fractions) {
      const int level = static_cast<int>(std::lround(f * prob.grid.nt));
      const std::string name = "m_t" + std::to_string(level) + ".csv";
      std::span<const double> slice =
          level == 0 ? std::span<const double>(prob.m0)
                     : std::span<const double>(sol.m)
                           .subspan(static_cast<std::size_t>(level - 1) * nxy,
                                    nxy);
      mfg::io::write_grid_csv((fs::path(cfg.output_dir) / name).string(),
                              prob.grid, slice);
      record_file(name);
    }

    manifest["converged"] = stats.converged;
    manifest["cp_iterations"] = static_cast<int>(stats.iterations.size());
    manifest["final_residual"] = stats.final_residual;
    manifest["avg_cg"] = stats.avg_cg();
    manifest["final_cg_tol"] = stats.final_cg_tol;
    manifest["mass_deviation"] = mfg::max_mass_deviation(stats.feasible_mass);
    manifest["feasible_constraint_norm"] = stats.feasible_constraint_norm;
    manifest["wall_seconds"] = stats.total_seconds;
    manifest["dual_seconds"] = stats.dual_seconds;
    manifest["primal_seconds"] = stats.primal_seconds;
    manifest["precond_seconds"] = stats.precond_seconds;
  } else {
    manifest["converged"] = false;
    manifest["error"] = solver_error;
  }
  manifest["complete"] = !solver_threw && stats.converged;
  manifest["files"] = files;

  std::ofstream mout(fs::path(cfg.output_dir) / "manifest.json");
  mout << manifest.dump(2) << "\n";

  if (solver_threw) {
    std::cerr << "solver failure: " << solver_error << "\n";
    return kExitSolver;
  }
  std::cout << (stats.converged ? "converged" : "NOT converged") << " in "
            << stats.iterations.size() << " iterations, final r "
            << stats.final_residual << ", avg cg " << stats.avg_cg() << ", "
            << stats.total_seconds << " s\n";
  if (!stats.converged) {
    std::cerr << "solver failure: iteration budget exhausted\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_spectrum(const std::string& config_path, std::string out_dir) {
  mfg::ProblemConfig cfg;
  try {
    cfg = mfg::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const mfg::Problem prob = mfg::build_problem(cfg);
  fs::create_directories(cfg.output_dir);

  const double nus[] = {1.0, 0.1, 0.01, 0.001};
  std::cout << "preconditioned spectrum at nx=" << prob.grid.nx
            << " ny=" << prob.grid.ny << " nt=" << prob.grid.nt << "\n";
  std::cout << "l  nu        unity count   max|lambda-1|\n";
  for (int l : {1, 2}) {
    for (double nu : nus) {
      mfg::SpectrumReport rep;
      try {
        rep = mfg::preconditioned_spectrum(prob.grid, nu, l);
      } catch (const std::exception& e) {
        std::cerr << "spectrum error: " << e.what() << "\n";
        return kExitConfig;
      }
      std::ostringstream name;
      name << "eigenvalues_l" << l << "_nu" << nu << ".csv";
      mfg::io::write_spectrum_csv(
          (fs::path(cfg.output_dir) / name.str()).string(), rep);
      std::printf("%d  %-8g  %11d   %.3e\n", l, nu, rep.unity_count,
                  rep.max_deviation);
    }
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& threads_list,
              std::string out_dir, int cp_iters, bool weak) {
  mfg::ProblemConfig cfg;
  std::vector<int> threads;
  try {
    cfg = mfg::load_config(config_path);
    threads = parse_int_list(threads_list);
    if (threads.empty()) throw std::invalid_argument("empty thread list");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  fs::create_directories(cfg.output_dir);

  std::vector<mfg::io::ScalingRow> rows;
  std::cout << (weak ? "weak" : "strong") << " scaling, " << cp_iters
            << " iterations per run\n";
  for (int t : threads) {
    mfg::ProblemConfig run_cfg = cfg;
    run_cfg.threads = t;
    if (weak) run_cfg.nt = cfg.nt * t;  // constant work per worker
    const mfg::Problem prob = mfg::build_problem(run_cfg);
    mfg::CpOptions opt = mfg::build_options(run_cfg);
    opt.max_cp_iters = cp_iters;
    opt.fixed_iterations = true;
    const auto [sol, stats] = mfg::run_cp(prob, opt);
    (void)sol;

    mfg::io::ScalingRow row;
    row.mode = weak ? "weak" : "strong";
    row.threads = t;
    row.nx = prob.grid.nx;
    row.ny = prob.grid.ny;
    row.nt = prob.grid.nt;
    row.seconds_total = stats.total_seconds;
    row.seconds_precond = stats.precond_seconds;
    if (rows.empty()) {
      row.speedup_total = 1.0;
      row.speedup_precond = 1.0;
    } else {
      row.speedup_total = rows.front().seconds_total / stats.total_seconds;
      row.speedup_precond =
          rows.front().seconds_precond / stats.precond_seconds;
    }
    rows.push_back(row);
    std::printf(
        "threads %3d  nt %5d  total %8.2f s  precond %8.2f s  speedup %.2f\n",
        t, row.nt, row.seconds_total, row.seconds_precond,
        row.speedup_precond);
  }
  mfg::io::write_scaling_csv(
      (fs::path(cfg.output_dir) / "scaling.csv").string(), rows);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel-in-time primal-dual solver for mean field games"};
  app.require_subcommand(1);

  std::string config_path, out_dir, snapshots = "0,0.1,0.5,1";
  std::string threads_list = "1";
  int threads = 0, cp_iters = 0, bench_iters = 100;
  bool weak = false;

  auto* solve = app.add_subcommand("solve", "run the solver");
  solve->add_option("--config", config_path, "JSON config path")->required();
  solve->add_option("--threads", threads, "worker threads (overrides config)");
  solve->add_option("--out", out_dir, "output directory (overrides config)");
  solve->add_option("--cp-iters", cp_iters, "cap on outer iterations");
  solve->add_option("--snapshots", snapshots,
                    "comma-separated time fractions for density snapshots");

  auto* spectrum = app.add_subcommand(
      "spectrum", "desk-scale preconditioned eigenvalue report");
  spectrum->add_option("--config", config_path, "JSON config path")
      ->required();
  spectrum->add_option("--out", out_dir, "output directory");

  auto* bench = app.add_subcommand(
      "bench", "thread-scaling benchmark (fixed iterations)");
  bench->add_option("--config", config_path, "JSON config path")->required();
  bench->add_option("--threads", threads_list,
                    "comma-separated thread counts, e.g. 1,2,4,8");
  bench->add_option("--out", out_dir, "output directory");
  bench->add_option("--cp-iters", bench_iters, "iterations per run");
  bench->add_flag("--weak", weak, "scale nt with the thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(config_path, threads, out_dir, cp_iters, snapshots);
    if (spectrum->parsed()) return cmd_spectrum(config_path, out_dir);
    if (bench->parsed())
      return cmd_bench(config_path, threads_list, out_dir, bench_iters, weak);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
