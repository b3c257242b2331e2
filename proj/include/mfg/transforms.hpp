#pragma once

#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

enum class TransformKind { Dst1, Dct2, Dct8, Rdft };

/// Eigenvalues of the time operator D_tt (tridiagonal -1/2/-1 with first
/// diagonal entry l): lambda_k = 2 - 2 cos(pi (k + l/2 - 1) / (nt + l/2)),
/// k = 1..nt. Strictly increasing in (0, 4).
std::vector<double> dtt_eigenvalues(int nt, int l);

/// Eigenvalues of the unscaled 1-D negative Laplacian in natural mode order:
/// periodic 2 - 2 cos(2 pi v / n), Neumann 2 - 2 cos(pi v / n), v = 0..n-1.
std::vector<double> laplace_eigenvalues(int n, Bc bc);

/// Precomputed real trigonometric transform of one axis with the eigenvalue
/// table of the second-difference operator it diagonalizes.
///
/// Each kind pairs with one operator M and satisfies forward(M x) =
/// eigenvalues .* forward(x):
///   Dst1: time operator with l = 2          Dct8: time operator with l = 1
///   Dct2: Neumann 1-D negative Laplacian    Rdft: periodic (circulant) one
///
/// Rdft packs the complex spectrum into n reals as
///   [Re c0, Re c1, Im c1, Re c2, Im c2, ..., (n even: Re c_{n/2})],
/// so its eigenvalue table is slot-ordered: conjugate pairs share a value.
/// Inverses are exact rescaled transposes; inverse(forward(x)) == x.
class TransformPlan {
public:
  static TransformPlan make(TransformKind kind, int n);

  TransformKind kind() const { return kind_; }
  int n() const { return n_; }
  const std::vector<double>& eigenvalues() const { return eig_; }

  void forward(std::span<const double> x, std::span<double> X) const;
  void inverse(std::span<const double> X, std::span<double> x) const;

  /// Batched over a row-major (n x cols) buffer, transforming along the outer
  /// (row) axis for the column range [col_begin, col_end). in != out.
  void forward_outer(const double* in, double* out, int cols, int col_begin,
                     int col_end) const;
  void inverse_outer(const double* in, double* out, int cols, int col_begin,
                     int col_end) const;

  /// Batched over a row-major (rows x n) buffer, transforming along the
  /// contiguous inner axis for the row range [row_begin, row_end). in != out.
  void forward_inner(const double* in, double* out, int rows, int row_begin,
                     int row_end) const;
  void inverse_inner(const double* in, double* out, int rows, int row_begin,
                     int row_end) const;

private:
  TransformKind kind_ = TransformKind::Dst1;
  int n_ = 0;
  std::vector<double> fwd_;  // row-major n x n
  std::vector<double> inv_;
  std::vector<double> eig_;
};

}  // namespace mfg
