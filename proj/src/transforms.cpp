#include "mfg/transforms.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfg {

namespace {

constexpr double kPi = std::numbers::pi;

using MatRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapCM = Eigen::Map<const MatRM>;

}  // namespace

std::vector<double> dtt_eigenvalues(int nt, int l) {
  if (nt < 1) throw std::invalid_argument("dtt_eigenvalues: nt must be >= 1");
  if (l != 1 && l != 2)
    throw std::invalid_argument("dtt_eigenvalues: l must be 1 or 2");
  std::vector<double> lam(nt);
  const double half_l = 0.5 * l;
  for (int k = 0; k < nt; ++k)
    lam[k] = 2.0 - 2.0 * std::cos(kPi * (k + half_l) / (nt + half_l));
  return lam;
}

std::vector<double> laplace_eigenvalues(int n, Bc bc) {
  if (n < 1) throw std::invalid_argument("laplace_eigenvalues: n must be >= 1");
  std::vector<double> lam(n);
  for (int v = 0; v < n; ++v)
    lam[v] = bc == Bc::Periodic ? 2.0 - 2.0 * std::cos(2.0 * kPi * v / n)
                                : 2.0 - 2.0 * std::cos(kPi * v / n);
  return lam;
}

TransformPlan TransformPlan::make(TransformKind kind, int n) {
  if (n < 1) throw std::invalid_argument("TransformPlan: n must be >= 1");
  TransformPlan p;
  p.kind_ = kind;
  p.n_ = n;
  p.fwd_.assign(static_cast<std::size_t>(n) * n, 0.0);
  p.inv_.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto F = [&](int r, int c) -> double& { return p.fwd_[r * n + c]; };
  auto I = [&](int r, int c) -> double& { return p.inv_[r * n + c]; };

  switch (kind) {
    case TransformKind::Dst1: {
      // rows sin(pi (k+1)(j+1)/(n+1)); V^2 = ((n+1)/2) Id
      const double s = 2.0 / (n + 1);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          const double v = std::sin(kPi * (k + 1.0) * (j + 1.0) / (n + 1));
          F(k, j) = v;
          I(k, j) = s * v;
        }
      p.eig_ = dtt_eigenvalues(n, 2);
      break;
    }
    case TransformKind::Dct8: {
      // rows cos(pi (k+1/2)(j+1/2)/(n+1/2)); V V^T = ((2n+1)/4) Id
      const double s = 4.0 / (2.0 * n + 1);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          const double v =
              std::cos(kPi * (k + 0.5) * (j + 0.5) / (n + 0.5));
          F(k, j) = v;
          I(k, j) = s * v;
        }
      p.eig_ = dtt_eigenvalues(n, 1);
      break;
    }
    case TransformKind::Dct2: {
      // rows cos(pi k (j+1/2)/n); row norms n (k=0) and n/2
      for (int k = 0; k < n; ++k) {
        const double s = (k == 0 ? 1.0 : 2.0) / n;
        for (int j = 0; j < n; ++j) {
          const double v = std::cos(kPi * k * (j + 0.5) / n);
          F(k, j) = v;
          I(j, k) = s * v;
        }
      }
      p.eig_ = laplace_eigenvalues(n, Bc::Neumann);
      break;
    }
    case TransformKind::Rdft: {
      // slot 0: c0; slots 2v-1, 2v: Re/Im of c_v; last slot Re c_{n/2} if n even
      p.eig_.assign(n, 0.0);
      const auto nat = laplace_eigenvalues(n, Bc::Periodic);
      for (int j = 0; j < n; ++j) {
        F(0, j) = 1.0;
        I(j, 0) = 1.0 / n;
      }
      p.eig_[0] = nat[0];
      const int vmax = (n - 1) / 2;
      for (int v = 1; v <= vmax; ++v) {
        for (int j = 0; j < n; ++j) {
          const double c = std::cos(2.0 * kPi * v * j / n);
          const double s = std::sin(2.0 * kPi * v * j / n);
          F(2 * v - 1, j) = c;
          F(2 * v, j) = -s;
          I(j, 2 * v - 1) = 2.0 * c / n;
          I(j, 2 * v) = -2.0 * s / n;
        }
        p.eig_[2 * v - 1] = nat[v];
        p.eig_[2 * v] = nat[v];
      }
      if (n % 2 == 0) {
        for (int j = 0; j < n; ++j) {
          const double v = j % 2 == 0 ? 1.0 : -1.0;
          F(n - 1, j) = v;
          I(j, n - 1) = v / n;
        }
        p.eig_[n - 1] = nat[n / 2];
      }
      break;
    }
  }
  return p;
}

void TransformPlan::forward(std::span<const double> x,
                            std::span<double> X) const {
  if (x.size() != static_cast<std::size_t>(n_) || X.size() != x.size())
    throw std::invalid_argument("TransformPlan::forward: size mismatch");
  forward_inner(x.data(), X.data(), 1, 0, 1);
}

void TransformPlan::inverse(std::span<const double> X,
                            std::span<double> x) const {
  if (X.size() != static_cast<std::size_t>(n_) || x.size() != X.size())
    throw std::invalid_argument("TransformPlan::inverse: size mismatch");
  inverse_inner(X.data(), x.data(), 1, 0, 1);
}

namespace {

// out[:, cb:ce] = M * in[:, cb:ce] for row-major (n x cols) buffers
void apply_outer(const std::vector<double>& M, int n, const double* in,
                 double* out, int cols, int cb, int ce) {
  MapCM Mm(M.data(), n, n);
  MapCM inm(in, n, cols);
  MapM outm(out, n, cols);
  outm.middleCols(cb, ce - cb).noalias() =
      Mm * inm.middleCols(cb, ce - cb);
}

// out[rb:re, :] = in[rb:re, :] * M^T for row-major (rows x n) buffers
void apply_inner(const std::vector<double>& M, int n, const double* in,
                 double* out, int rows, int rb, int re) {
  MapCM Mm(M.data(), n, n);
  MapCM inm(in, rows, n);
  MapM outm(out, rows, n);
  outm.middleRows(rb, re - rb).noalias() =
      inm.middleRows(rb, re - rb) * Mm.transpose();
}

}  // namespace

void TransformPlan::forward_outer(const double* in, double* out, int cols,
                                  int cb, int ce) const {
  apply_outer(fwd_, n_, in, out, cols, cb, ce);
}
void TransformPlan::inverse_outer(const double* in, double* out, int cols,
                                  int cb, int ce) const {
  apply_outer(inv_, n_, in, out, cols, cb, ce);
}
void TransformPlan::forward_inner(const double* in, double* out, int rows,
                                  int rb, int re) const {
  apply_inner(fwd_, n_, in, out, rows, rb, re);
}
void TransformPlan::inverse_inner(const double* in, double* out, int rows,
                                  int rb, int re) const {
  apply_inner(inv_, n_, in, out, rows, rb, re);
}

}  // namespace mfg
