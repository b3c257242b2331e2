#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfg {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void check_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw std::invalid_argument(std::string(what) + ": size mismatch, got " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(n));
}

}  // namespace

Grid Grid::make(Bc bc, int nx, int ny, int nt, double ax, double bx, double ay,
                double by, double T) {
  require(nx >= 1 && ny >= 1 && nt >= 1, "Grid: node counts must be positive");
  require(bx > ax && by > ay, "Grid: empty domain rectangle");
  require(T > 0, "Grid: final time must be positive");
  Grid g;
  g.bc = bc;
  g.nx = nx;
  g.ny = ny;
  g.nt = nt;
  g.ax = ax;
  g.bx = bx;
  g.ay = ay;
  g.by = by;
  g.T = T;
  const int ex = bc == Bc::Periodic ? 0 : 1;
  g.dx = (bx - ax) / (nx + ex);
  g.dy = (by - ay) / (ny + ex);
  g.dt = T / nt;
  return g;
}

PrimalState zero_state(const Grid& g) {
  PrimalState s;
  s.m.assign(g.size(), 0.0);
  s.w.assign(4 * g.size(), 0.0);
  return s;
}

std::array<double, 4> project_cone(const std::array<double, 4>& z) {
  return {std::max(z[0], 0.0), std::min(z[1], 0.0), std::max(z[2], 0.0),
          std::min(z[3], 0.0)};
}

void apply_K(const Grid& g, std::span<const double> f, std::span<double> out) {
  const int nx = g.nx, ny = g.ny;
  check_size(f, static_cast<std::size_t>(nx) * ny, "apply_K input");
  check_size(out, static_cast<std::size_t>(nx) * ny, "apply_K output");
  const double sx = 1.0 / (g.dx * g.dx);
  const double sy = 1.0 / (g.dy * g.dy);
  const bool per = g.bc == Bc::Periodic;
  for (int i = 0; i < nx; ++i) {
    const int il = per ? (i + nx - 1) % nx : i - 1;
    const int ir = per ? (i + 1) % nx : i + 1;
    for (int j = 0; j < ny; ++j) {
      const int jl = per ? (j + ny - 1) % ny : j - 1;
      const int jr = per ? (j + 1) % ny : j + 1;
      const double c = f[i * ny + j];
      double v = 0.0;
      if (il >= 0) v += sx * (c - f[il * ny + j]);
      if (ir < nx) v += sx * (c - f[ir * ny + j]);
      if (jl >= 0) v += sy * (c - f[i * ny + jl]);
      if (jr < ny) v += sy * (c - f[i * ny + jr]);
      out[i * ny + j] = v;
    }
  }
}

void apply_L(const Grid& g, double nu, std::span<const double> f,
             std::span<double> out) {
  apply_K(g, f, out);
  const double idt = 1.0 / g.dt;
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p] = nu * out[p] + idt * f[p];
}

// Divergence at node (i,j): backward difference of w1/w3 plus forward
// difference of w2/w4 in the matching axis. Under the Neumann closure the
// one-sided rows drop the structurally excluded entries (w1, w3 at the last
// node; w2, w4 at the first), which makes B B^T equal 2K exactly.
void apply_B(const Grid& g, std::span<const double> w4,
             std::span<double> out) {
  const int nx = g.nx, ny = g.ny;
  const std::size_t nxy = static_cast<std::size_t>(nx) * ny;
  check_size(w4, 4 * nxy, "apply_B input");
  check_size(out, nxy, "apply_B output");
  const bool per = g.bc == Bc::Periodic;
  const double ix = 1.0 / g.dx, iy = 1.0 / g.dy;
  auto w = [&](int c, int i, int j) { return w4[c * nxy + i * ny + j]; };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      double v = 0.0;
      if (per) {
        const int il = (i + nx - 1) % nx, ir = (i + 1) % nx;
        const int jl = (j + ny - 1) % ny, jr = (j + 1) % ny;
        v += ix * (w(0, i, j) - w(0, il, j));
        v += ix * (w(1, ir, j) - w(1, i, j));
        v += iy * (w(2, i, j) - w(2, i, jl));
        v += iy * (w(3, i, jr) - w(3, i, j));
      } else {
        double a = i < nx - 1 ? w(0, i, j) : 0.0;
        if (i > 0) a -= w(0, i - 1, j);
        double b = i + 1 < nx ? w(1, i + 1, j) : 0.0;
        if (i > 0) b -= w(1, i, j);
        double c = j < ny - 1 ? w(2, i, j) : 0.0;
        if (j > 0) c -= w(2, i, j - 1);
        double d = j + 1 < ny ? w(3, i, j + 1) : 0.0;
        if (j > 0) d -= w(3, i, j);
        v = ix * (a + b) + iy * (c + d);
      }
      out[i * ny + j] = v;
    }
  }
}

void apply_B_transpose(const Grid& g, std::span<const double> s,
                       std::span<double> out) {
  const int nx = g.nx, ny = g.ny;
  const std::size_t nxy = static_cast<std::size_t>(nx) * ny;
  check_size(s, nxy, "apply_B_transpose input");
  check_size(out, 4 * nxy, "apply_B_transpose output");
  const bool per = g.bc == Bc::Periodic;
  const double ix = 1.0 / g.dx, iy = 1.0 / g.dy;
  for (int i = 0; i < nx; ++i) {
    const int ir = per ? (i + 1) % nx : i + 1;
    const int il = per ? (i + nx - 1) % nx : i - 1;
    for (int j = 0; j < ny; ++j) {
      const int jr = per ? (j + 1) % ny : j + 1;
      const int jl = per ? (j + ny - 1) % ny : j - 1;
      const double sc = s[i * ny + j];
      double w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0;
      if (per || i < nx - 1) w1 = sc - s[ir * ny + j];  // (D1^T s)_i
      if (per || i > 0) w2 = s[il * ny + j] - sc;       // (D2^T s)_i
      if (per || j < ny - 1) w3 = sc - s[i * ny + jr];
      if (per || j > 0) w4 = s[i * ny + jl] - sc;
      out[0 * nxy + i * ny + j] = ix * w1;
      out[1 * nxy + i * ny + j] = ix * w2;
      out[2 * nxy + i * ny + j] = iy * w3;
      out[3 * nxy + i * ny + j] = iy * w4;
    }
  }
}

void apply_bigA(const Grid& g, double nu, std::span<const double> x,
                std::span<double> out, const ThreadPool& pool) {
  const std::size_t nxy = g.nxy();
  const std::size_t n = g.size();
  check_size(x, n, "apply_bigA input");
  check_size(out, n, "apply_bigA output");
  const double idt = 1.0 / g.dt;
  const double idt2 = idt * idt;

  // u = L x per level, then
  // out_k = L u_k + 2 K x_k + [k >= 2] x_k/dt^2 - (u_{k-1} + u_{k+1})/dt
  std::vector<double> u(n);
  pool.for_ranges(g.nt, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k)
      apply_L(g, nu, x.subspan(k * nxy, nxy),
              std::span<double>(u).subspan(k * nxy, nxy));
  });
  pool.for_ranges(g.nt, [&](std::size_t kb, std::size_t ke) {
    std::vector<double> t(nxy);
    for (std::size_t k = kb; k < ke; ++k) {
      auto xk = x.subspan(k * nxy, nxy);
      auto ok = out.subspan(k * nxy, nxy);
      apply_L(g, nu, std::span<const double>(u).subspan(k * nxy, nxy), ok);
      apply_K(g, xk, t);
      const double diag = k >= 1 ? idt2 : 0.0;  // block (1,1) lacks the I/dt^2 shift
      for (std::size_t p = 0; p < nxy; ++p) ok[p] += 2.0 * t[p] + diag * xk[p];
      if (k > 0) {
        const double* um = u.data() + (k - 1) * nxy;
        for (std::size_t p = 0; p < nxy; ++p) ok[p] -= idt * um[p];
      }
      if (k + 1 < static_cast<std::size_t>(g.nt)) {
        const double* up = u.data() + (k + 1) * nxy;
        for (std::size_t p = 0; p < nxy; ++p) ok[p] -= idt * up[p];
      }
    }
  });
}

void reduce_rhs(const Grid& g, std::span<const double> full,
                std::span<double> reduced, std::span<double> z0_data) {
  const std::size_t nxy = g.nxy();
  check_size(full, (g.nt + 1) * nxy, "reduce_rhs input");
  check_size(reduced, g.size(), "reduce_rhs output");
  check_size(z0_data, nxy, "reduce_rhs z0_data");
  const double idt = 1.0 / g.dt;
  std::copy(full.begin(), full.begin() + nxy, z0_data.begin());
  std::copy(full.begin() + nxy, full.end(), reduced.begin());
  for (std::size_t p = 0; p < nxy; ++p) reduced[p] += idt * full[p];
}

void expand_solution(const Grid& g, std::span<const double> reduced,
                     std::span<const double> z0_data, std::span<double> full) {
  const std::size_t nxy = g.nxy();
  check_size(reduced, g.size(), "expand_solution input");
  check_size(z0_data, nxy, "expand_solution z0_data");
  check_size(full, (g.nt + 1) * nxy, "expand_solution output");
  const double idt = 1.0 / g.dt;
  for (std::size_t p = 0; p < nxy; ++p) full[p] = z0_data[p] + idt * reduced[p];
  std::copy(reduced.begin(), reduced.end(), full.begin() + nxy);
}

void apply_C(const Grid& g, double nu, std::span<const double> m,
             std::span<const double> w, std::span<double> out,
             const ThreadPool& pool) {
  const std::size_t nxy = g.nxy();
  check_size(m, g.size(), "apply_C m");
  check_size(w, 4 * g.size(), "apply_C w");
  check_size(out, (g.nt + 1) * nxy, "apply_C output");
  const double idt = 1.0 / g.dt;
  std::fill(out.begin(), out.begin() + nxy, 0.0);
  pool.for_ranges(g.nt, [&](std::size_t kb, std::size_t ke) {
    std::vector<double> t(nxy);
    for (std::size_t k = kb; k < ke; ++k) {
      auto ok = out.subspan((k + 1) * nxy, nxy);
      apply_L(g, nu, m.subspan(k * nxy, nxy), ok);
      apply_B(g, w.subspan(k * 4 * nxy, 4 * nxy), t);
      if (k > 0) {
        const double* mp = m.data() + (k - 1) * nxy;
        for (std::size_t p = 0; p < nxy; ++p) ok[p] += t[p] - idt * mp[p];
      } else {
        for (std::size_t p = 0; p < nxy; ++p) ok[p] += t[p];
      }
    }
  });
}

void apply_C_transpose(const Grid& g, double nu, std::span<const double> z,
                       std::span<double> m_out, std::span<double> w_out,
                       const ThreadPool& pool) {
  const std::size_t nxy = g.nxy();
  check_size(z, (g.nt + 1) * nxy, "apply_C_transpose input");
  check_size(m_out, g.size(), "apply_C_transpose m");
  check_size(w_out, 4 * g.size(), "apply_C_transpose w");
  const double idt = 1.0 / g.dt;
  pool.for_ranges(g.nt, [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      // the m^{k+1} column appears in constraint rows k+1 (as L) and k+2
      auto mk = m_out.subspan(k * nxy, nxy);
      apply_L(g, nu, z.subspan((k + 1) * nxy, nxy), mk);
      if (k + 2 <= static_cast<std::size_t>(g.nt)) {
        const double* zn = z.data() + (k + 2) * nxy;
        for (std::size_t p = 0; p < nxy; ++p) mk[p] -= idt * zn[p];
      }
      apply_B_transpose(g, z.subspan((k + 1) * nxy, nxy),
                        w_out.subspan(k * 4 * nxy, 4 * nxy));
    }
  });
}

void constraint_residual(const Grid& g, double nu, std::span<const double> m0,
                         std::span<const double> m, std::span<const double> w,
                         std::span<double> out) {
  const std::size_t nxy = g.nxy();
  check_size(m0, nxy, "constraint_residual m0");
  check_size(m, g.size(), "constraint_residual m");
  check_size(w, 4 * g.size(), "constraint_residual w");
  check_size(out, g.size(), "constraint_residual output");
  const double idt = 1.0 / g.dt;
  std::vector<double> t(nxy);
  for (int k = 0; k < g.nt; ++k) {
    auto ok = out.subspan(static_cast<std::size_t>(k) * nxy, nxy);
    apply_K(g, m.subspan(static_cast<std::size_t>(k) * nxy, nxy), ok);
    apply_B(g, w.subspan(static_cast<std::size_t>(k) * 4 * nxy, 4 * nxy), t);
    const double* prev = k > 0 ? m.data() + (k - 1) * nxy : m0.data();
    const double* cur = m.data() + static_cast<std::size_t>(k) * nxy;
    for (std::size_t p = 0; p < nxy; ++p)
      ok[p] = nu * ok[p] + idt * (cur[p] - prev[p]) + t[p];
  }
}

}  // namespace mfg
