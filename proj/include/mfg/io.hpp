#pragma once

#include <string>
#include <vector>

#include "mfg/analysis.hpp"
#include "mfg/cp.hpp"

namespace mfg::io {

/// stats.csv: iter,r,cg_iters,tau,sigma,theta,t_dual,t_primal per iteration.
void write_stats_csv(const std::string& path, const SolveStats& stats);
std::vector<IterRecord> read_stats_csv(const std::string& path);

/// One spatial slice as an ny-row by nx-column grid of full-precision values.
void write_grid_csv(const std::string& path, const Grid& g,
                    std::span<const double> slice);
std::vector<double> read_grid_csv(const std::string& path, int& rows,
                                  int& cols);

/// eigenvalues csv: index,real,imag.
void write_spectrum_csv(const std::string& path, const SpectrumReport& rep);

struct ScalingRow {
  std::string mode;  // "strong" or "weak"
  int threads = 0;
  int nx = 0, ny = 0, nt = 0;
  double seconds_total = 0.0;
  double seconds_precond = 0.0;
  double speedup_total = 0.0;
  double speedup_precond = 0.0;
};
void write_scaling_csv(const std::string& path,
                       const std::vector<ScalingRow>& rows);

std::string format_full(double v);  // round-trip exact decimal form

}  // namespace mfg::io
