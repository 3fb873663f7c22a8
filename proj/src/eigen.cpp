#include "qchan/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qchan/errors.hpp"

namespace qchan {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalFactor = 1e-14;  // relative to ||M||_F

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing A(p,q). The 2x2 pivot block
// [alpha, beta; conj(beta), gamma] is diagonalized by
// J = [c, s e^{i phi}; -s e^{-i phi}, c] with phi = arg(beta); the zeroing
// condition (alpha-gamma)cs + |beta|(c^2-s^2) = 0 gives t^2 - 2 tau t - 1 = 0,
// tau = (alpha-gamma)/(2|beta|), and we take the smaller root for stability.
void rotate(ComplexMatrix& a, ComplexMatrix& u, std::size_t p, std::size_t q) {
  const cplx beta = a(p, q);
  const double babs = std::abs(beta);
  if (babs < 1e-300) {
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    return;
  }
  const cplx phase = beta / babs;  // e^{i phi}
  const double alpha = a(p, p).real();
  const double gamma = a(q, q).real();
  const double tau = (alpha - gamma) / (2.0 * babs);
  const double sign = tau >= 0.0 ? 1.0 : -1.0;
  const double t = -sign / (std::abs(tau) + std::hypot(1.0, tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const std::size_t n = a.rows();
  // A <- A J (columns p and q).
  for (std::size_t r = 0; r < n; ++r) {
    const cplx arp = a(r, p);
    const cplx arq = a(r, q);
    a(r, p) = c * arp - s * std::conj(phase) * arq;
    a(r, q) = s * phase * arp + c * arq;
  }
  // A <- J^dagger A (rows p and q).
  for (std::size_t r = 0; r < n; ++r) {
    const cplx apr = a(p, r);
    const cplx aqr = a(q, r);
    a(p, r) = c * apr - s * phase * aqr;
    a(q, r) = s * std::conj(phase) * apr + c * aqr;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  // U <- U J.
  for (std::size_t r = 0; r < n; ++r) {
    const cplx urp = u(r, p);
    const cplx urq = u(r, q);
    u(r, p) = c * urp - s * std::conj(phase) * urq;
    u(r, q) = s * phase * urp + c * urq;
  }
}

}  // namespace

HermitianEigen hermitian_eigen(const ComplexMatrix& m, double tol) {
  if (!m.square()) throw DimensionMismatch("eigendecomposition needs a square matrix");
  if (!m.is_hermitian(tol)) throw NotHermitian("matrix is not Hermitian within tolerance");

  const std::size_t n = m.rows();
  // Work on the symmetrized copy so roundoff asymmetry cannot bias sweeps.
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));

  ComplexMatrix u = ComplexMatrix::identity(n);
  const double target = kOffDiagonalFactor * std::max(m.frobenius_norm(), 1e-300);

  bool converged = off_diagonal_norm(a) <= target;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, u, p, q);
    converged = off_diagonal_norm(a) <= target;
  }
  if (!converged) throw NoConvergence("Jacobi sweeps exceeded limit");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  HermitianEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = u(i, order[j]);
  }
  return out;
}

ComplexMatrix matrix_fn_psd(const ComplexMatrix& m, SpectralFn fn, double eigfloor) {
  HermitianEigen eig = hermitian_eigen(m);
  const double floor_neg = -1e-9;
  for (double v : eig.eigenvalues) {
    if (v < floor_neg) throw NegativeSpectrum("matrix is not PSD within tolerance");
  }
  const std::size_t n = m.rows();
  std::vector<double> mapped(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::max(eig.eigenvalues[i], 0.0);
    if (fn.kind == SpectralFn::Kind::Log2) {
      mapped[i] = std::log2(std::max(v, eigfloor));
    } else {
      mapped[i] = v > 0.0 ? std::pow(v, fn.exponent) : 0.0;
    }
  }
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eig.eigenvectors(i, k) * mapped[k] * std::conj(eig.eigenvectors(j, k));
      out(i, j) = s;
    }
  return out;
}

double schatten_norm(const ComplexMatrix& m, double p) {
  if (p < 1.0) throw BadExponent("Schatten norm needs p >= 1");
  HermitianEigen eig = hermitian_eigen(m);
  for (double v : eig.eigenvalues) {
    if (v < -1e-9) throw NegativeSpectrum("Schatten norm expects a PSD matrix");
  }
  if (std::isinf(p)) {
    double top = 0.0;
    for (double v : eig.eigenvalues) top = std::max(top, std::max(v, 0.0));
    return top;
  }
  double s = 0.0;
  for (double v : eig.eigenvalues) {
    if (v > 0.0) s += std::pow(v, p);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace qchan
