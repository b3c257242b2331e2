#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/precond.hpp"

namespace mfg {

/// Spectrum of the preconditioned space-time matrix P^{-1} A at desk scale.
struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // sorted by real, then imag
  int unity_count = 0;      // eigenvalues with |lambda - 1| <= 1e-8
  double max_deviation = 0.0;
};

/// Dense generalized eigenproblem A v = lambda P v, computed by applying the
/// preconditioner to the columns of the densely assembled matrix and running
/// a nonsymmetric eigensolver. Rejects nt*nx*ny > 1024. At least
/// (nt-1)*nx*ny eigenvalues equal 1: the two matrices differ only in the
/// first diagonal block.
SpectrumReport preconditioned_spectrum(const Grid& g, double nu, int l);

/// Per-time-level total mass, levels 0..nt (level 0 from the initial datum).
std::vector<double> mass_audit(const Grid& g, std::span<const double> m0,
                               std::span<const double> m);

/// max_k |mass_k - mass_0| over a mass vector.
double max_mass_deviation(const std::vector<double>& masses);

}  // namespace mfg
