#include "mfg/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg {

SpectrumReport preconditioned_spectrum(const Grid& g, double nu, int l) {
  const std::size_t n = g.size();
  if (n > 1024)
    throw std::invalid_argument(
        "preconditioned_spectrum: grid too large for dense assembly");

  PrecondSpec spec;
  spec.l = l;
  spec.nu = nu;
  const Preconditioner P(g, spec);

  Eigen::MatrixXd M(n, n);
  std::vector<double> e(n, 0.0), col(n), pcol(n);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    apply_bigA(g, nu, e, col);
    e[c] = 0.0;
    P.apply(col, pcol);
    for (std::size_t r = 0; r < n; ++r) M(r, c) = pcol[r];
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("preconditioned_spectrum: eigensolver failed");

  SpectrumReport rep;
  rep.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    rep.eigenvalues[i] = es.eigenvalues()(i);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return a.real() != b.real() ? a.real() < b.real()
                                          : a.imag() < b.imag();
            });
  for (const auto& lam : rep.eigenvalues) {
    const double dev = std::abs(lam - std::complex<double>(1.0, 0.0));
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (dev <= 1e-8) ++rep.unity_count;
  }
  return rep;
}

std::vector<double> mass_audit(const Grid& g, std::span<const double> m0,
                               std::span<const double> m) {
  if (m0.size() != static_cast<std::size_t>(g.nxy()) || m.size() != g.size())
    throw std::invalid_argument("mass_audit: size mismatch");
  std::vector<double> masses(g.nt + 1, 0.0);
  for (double v : m0) masses[0] += v;
  const std::size_t nxy = g.nxy();
  for (int k = 0; k < g.nt; ++k) {
    double s = 0.0;
    const double* mk = m.data() + static_cast<std::size_t>(k) * nxy;
    for (std::size_t p = 0; p < nxy; ++p) s += mk[p];
    masses[k + 1] = s;
  }
  return masses;
}

double max_mass_deviation(const std::vector<double>& masses) {
  if (masses.empty()) return 0.0;
  double d = 0.0;
  for (double v : masses) d = std::max(d, std::abs(v - masses[0]));
  return d;
}

}  // namespace mfg
