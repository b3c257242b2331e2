#include "mfg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfg::io {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("io: " + msg);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write '" + path + "'");
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (...) {
    fail("bad numeric field '" + s + "'");
  }
}

}  // namespace

std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_stats_csv(const std::string& path, const SolveStats& stats) {
  auto out = open_out(path);
  out << "iter,r,cg_iters,tau,sigma,theta,t_dual,t_primal\n";
  for (const auto& it : stats.iterations)
    out << it.iter << ',' << format_full(it.r) << ',' << it.cg_iters << ','
        << format_full(it.tau) << ',' << format_full(it.sigma) << ','
        << format_full(it.theta) << ',' << format_full(it.t_dual) << ','
        << format_full(it.t_primal) << '\n';
}

std::vector<IterRecord> read_stats_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail("empty stats file");
  std::vector<IterRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) fail("stats row with wrong field count");
    IterRecord r;
    r.iter = static_cast<int>(to_double(f[0]));
    r.r = to_double(f[1]);
    r.cg_iters = static_cast<int>(to_double(f[2]));
    r.tau = to_double(f[3]);
    r.sigma = to_double(f[4]);
    r.theta = to_double(f[5]);
    r.t_dual = to_double(f[6]);
    r.t_primal = to_double(f[7]);
    rows.push_back(r);
  }
  return rows;
}

void write_grid_csv(const std::string& path, const Grid& g,
                    std::span<const double> slice) {
  if (slice.size() != static_cast<std::size_t>(g.nxy()))
    fail("grid slice size mismatch");
  auto out = open_out(path);
  // ny rows, nx columns: row j holds the values along x at height y_j
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) out << ',';
      out << format_full(slice[i * g.ny + j]);
    }
    out << '\n';
  }
}

std::vector<double> read_grid_csv(const std::string& path, int& rows,
                                  int& cols) {
  std::ifstream in(path);
  if (!in) fail("cannot read '" + path + "'");
  std::vector<double> vals;
  std::string line;
  rows = 0;
  cols = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (cols < 0)
      cols = static_cast<int>(f.size());
    else if (static_cast<int>(f.size()) != cols)
      fail("ragged grid csv");
    for (const auto& s : f) vals.push_back(to_double(s));
    ++rows;
  }
  return vals;
}

void write_spectrum_csv(const std::string& path, const SpectrumReport& rep) {
  auto out = open_out(path);
  out << "index,real,imag\n";
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
    out << i << ',' << format_full(rep.eigenvalues[i].real()) << ','
        << format_full(rep.eigenvalues[i].imag()) << '\n';
}

void write_scaling_csv(const std::string& path,
                       const std::vector<ScalingRow>& rows) {
  auto out = open_out(path);
  out << "mode,threads,nx,ny,nt,size,seconds_total,seconds_precond,"
         "speedup_total,speedup_precond\n";
  for (const auto& r : rows)
    out << r.mode << ',' << r.threads << ',' << r.nx << ',' << r.ny << ','
        << r.nt << ',' << static_cast<long long>(r.nx) * r.ny * r.nt << ','
        << format_full(r.seconds_total) << ',' << format_full(r.seconds_precond)
        << ',' << format_full(r.speedup_total) << ','
        << format_full(r.speedup_precond) << '\n';
}

}  // namespace mfg::io
