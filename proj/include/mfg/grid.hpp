#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mfg/parallel.hpp"

namespace mfg {

enum class Bc { Periodic, Neumann };

/// Space-time discretization of a rectangle [ax,bx] x [ay,by] over [0,T].
///
/// Periodic grids carry nx*ny nodes per level with spacing (bx-ax)/nx; Neumann
/// grids carry the nx*ny interior nodes with spacing (bx-ax)/(nx+1), so the
/// unknown count is the same for both closures. Scalar fields are stored flat,
/// time level outermost, then x, then y: index (k,i,j) = (k*nx + i)*ny + j.
struct Grid {
  Bc bc = Bc::Periodic;
  int nx = 1, ny = 1, nt = 1;
  double ax = 0, bx = 1, ay = 0, by = 1;
  double T = 1;
  double dx = 1, dy = 1, dt = 1;

  static Grid make(Bc bc, int nx, int ny, int nt, double ax, double bx,
                   double ay, double by, double T);

  int nxy() const { return nx * ny; }
  std::size_t size() const { return static_cast<std::size_t>(nt) * nxy(); }
  std::size_t idx(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * nx + i) * ny + j;
  }
  double x(int i) const { return ax + (bc == Bc::Periodic ? i : i + 1) * dx; }
  double y(int j) const { return ay + (bc == Bc::Periodic ? j : j + 1) * dy; }
};

/// Density trajectory, time levels 1..nt (the initial datum is separate data).
using ScalarField = std::vector<double>;

/// Four-component momentum, time levels 0..nt-1. Per level the components are
/// stored as four contiguous spatial slices: index ((k*4 + c)*nx + i)*ny + j.
using MomentumField = std::vector<double>;

struct PrimalState {
  ScalarField m;    // nt*nx*ny
  MomentumField w;  // 4*nt*nx*ny
};

/// The multiplier iterate of the primal-dual scheme has the same shape.
using DualState = PrimalState;

PrimalState zero_state(const Grid& g);

/// Projection onto the sign cone [0,inf) x (-inf,0] x [0,inf) x (-inf,0].
std::array<double, 4> project_cone(const std::array<double, 4>& z);

/// out = K f on one spatial slice, K the scaled negative Laplacian
/// (1/dx^2) Dxx (x) I + (1/dy^2) I (x) Dyy with the closure picked by g.bc.
void apply_K(const Grid& g, std::span<const double> f, std::span<double> out);

/// out = nu*K f + f/dt (one spatial slice).
void apply_L(const Grid& g, double nu, std::span<const double> f,
             std::span<double> out);

/// Discrete divergence of a one-level momentum slice (4*nxy -> nxy) and its
/// exact Euclidean adjoint (nxy -> 4*nxy).
void apply_B(const Grid& g, std::span<const double> w4, std::span<double> out);
void apply_B_transpose(const Grid& g, std::span<const double> s,
                       std::span<double> out);

/// Matrix-free matvec of the reduced space-time normal matrix: block
/// tridiagonal with diagonal C_1 = L^2 + 2K, C_k = L^2 + 2K + I/dt^2 (k >= 2)
/// and off-diagonal -L/dt. Symmetric positive definite for nu >= 0.
void apply_bigA(const Grid& g, double nu, std::span<const double> x,
                std::span<double> out, const ThreadPool& pool = ThreadPool(1));

/// Schur elimination of the initial-condition block row. `full` spans time
/// levels 0..nt ((nt+1)*nxy entries); the reduced system spans 1..nt.
/// reduced[1] = full[1] + full[0]/dt, other levels copied; z0_data keeps
/// full[0] so that expand can reconstruct level 0 as z0 = z0_data + z1/dt.
void reduce_rhs(const Grid& g, std::span<const double> full,
                std::span<double> reduced, std::span<double> z0_data);
void expand_solution(const Grid& g, std::span<const double> reduced,
                     std::span<const double> z0_data, std::span<double> full);

/// Constraint operator over full time levels 0..nt. Level 0 of the output is
/// zero (the initial-condition row involves no unknown; its datum sits in the
/// right-hand side); level k >= 1 is L m^k - m^{k-1}/dt + B w^{k-1}.
void apply_C(const Grid& g, double nu, std::span<const double> m,
             std::span<const double> w, std::span<double> out,
             const ThreadPool& pool = ThreadPool(1));

/// Adjoint of apply_C into a (m, w) pair; level 0 of z is ignored because no
/// unknown appears in that row.
void apply_C_transpose(const Grid& g, double nu, std::span<const double> z,
                       std::span<double> m_out, std::span<double> w_out,
                       const ThreadPool& pool = ThreadPool(1));

/// Residual of the discrete continuity constraint, levels 1..nt:
/// (m^k - m^{k-1})/dt + nu*K m^k + div w^{k-1}, with m^0 = m0.
void constraint_residual(const Grid& g, double nu, std::span<const double> m0,
                         std::span<const double> m, std::span<const double> w,
                         std::span<double> out);

}  // namespace mfg
