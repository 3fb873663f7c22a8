#pragma once

#include <vector>

#include "qchan/matrix.hpp"

namespace qchan {

struct HermitianEigen {
  std::vector<double> eigenvalues;  // sorted non-increasing
  ComplexMatrix eigenvectors;       // unitary; column j pairs with eigenvalues[j]
};

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi with complex
// plane rotations. Each rotation annihilates one off-diagonal pair; sweeps
// repeat until the off-diagonal Frobenius norm falls below 1e-14 * ||M||_F,
// with a hard cap of 100 sweeps (NoConvergence beyond that). The input must
// satisfy ||M - M^dagger||_F <= tol.
HermitianEigen hermitian_eigen(const ComplexMatrix& m, double tol = 1e-10);

struct SpectralFn {
  enum class Kind { Log2, Power };
  Kind kind;
  double exponent;

  static SpectralFn log2() { return {Kind::Log2, 0.0}; }
  static SpectralFn power(double p) { return {Kind::Power, p}; }
};

// Apply a scalar function to the spectrum of a Hermitian PSD matrix.
// For Log2, eigenvalues are clamped below at eigfloor before taking logs so
// that rank-deficient inputs stay finite; for Power, eigenvalues are mapped
// exactly (tiny negatives are clamped to zero first).
ComplexMatrix matrix_fn_psd(const ComplexMatrix& m, SpectralFn fn, double eigfloor = 1e-300);

// Schatten p-norm of a Hermitian PSD matrix; p >= 1, infinity allowed.
double schatten_norm(const ComplexMatrix& m, double p);

}  // namespace qchan
