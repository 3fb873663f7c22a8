#pragma once

// Shared generators for the test binaries. Everything is seeded and
// deterministic; no test draws from a global RNG.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qchan/eigen.hpp"
#include "qchan/matrix.hpp"
#include "qchan/rng.hpp"

namespace qtest {

using qchan::ComplexMatrix;
using qchan::cplx;
using qchan::RngStream;

inline ComplexMatrix random_hermitian(std::size_t d, RngStream& rng, double scale = 1.0) {
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = scale * rng.uniform(-1.0, 1.0);
    for (std::size_t j = i + 1; j < d; ++j) {
      const cplx v = scale * rng.complex_in_square();
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

// Full-rank density matrix: a random-pure mixture floored by a slice of I/d.
inline ComplexMatrix random_state(std::size_t d, RngStream& rng) {
  ComplexMatrix rho(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const ComplexMatrix psi = qchan::random_ket(d, rng);
    rho += (1.0 / static_cast<double>(d)) * qchan::projector(psi);
  }
  const double eps = 0.05;
  rho *= 1.0 - eps;
  for (std::size_t i = 0; i < d; ++i) rho(i, i) += eps / static_cast<double>(d);
  return rho;
}

// Rank-deficient (generically) mixture of `rank` pure states.
inline ComplexMatrix random_state_of_rank(std::size_t d, std::size_t rank, RngStream& rng) {
  ComplexMatrix rho(d, d);
  std::vector<double> w(rank);
  double total = 0.0;
  for (double& v : w) {
    v = rng.uniform(0.1, 1.0);
    total += v;
  }
  for (std::size_t k = 0; k < rank; ++k)
    rho += (w[k] / total) * qchan::projector(qchan::random_ket(d, rng));
  return rho;
}

inline ComplexMatrix random_unitary(std::size_t d, RngStream& rng) {
  // eigenvectors of a random Hermitian matrix form a Haar-ish unitary,
  // orthonormal to machine precision by construction
  return qchan::hermitian_eigen(random_hermitian(d, rng), 1e-9).eigenvectors;
}

inline double frob_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

// Golden-section maximizer of a unimodal function on [lo, hi]; returns the
// midpoint of the final bracket of width tol.
template <typename F>
double golden_max(F f, double lo, double hi, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Coarse scan followed by golden-section refinement around the best sample.
template <typename F>
double scan_then_golden(F f, double lo, double hi, double step, double tol) {
  double best_x = lo, best = f(lo);
  for (double x = lo + step; x < hi; x += step) {
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return golden_max(f, std::max(lo, best_x - 2.0 * step), std::min(hi, best_x + 2.0 * step),
                    tol);
}

}  // namespace qtest
