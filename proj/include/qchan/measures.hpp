#pragma once

#include <cstdint>
#include <vector>

#include "qchan/channel.hpp"
#include "qchan/matrix.hpp"

namespace qchan {

// Eigenvalue list sorted non-increasing with tiny negatives clamped to zero.
struct Spectrum {
  std::vector<double> values;

  static Spectrum from_state(const ComplexMatrix& rho);
  static Spectrum from_values(std::vector<double> vals);
};

// x majorizes y: every partial sum of x dominates the one of y and the totals
// agree (all within 1e-12).
bool majorizes(const Spectrum& x, const Spectrum& y);

// Submajorization drops the total-sum equality: all partial sums of x
// dominate those of y (the zero-padded extension of majorization).
bool submajorizes(const Spectrum& x, const Spectrum& y);

// Shannon entropy in bits of a non-negative vector; terms below 1e-15 are
// treated as 0 log 0 = 0.
double entropy_of_spectrum(const std::vector<double>& values);

// Von Neumann entropy in bits of a density matrix.
double entropy(const ComplexMatrix& rho);

// Relative entropy H(rho, gamma) = Tr rho (log2 rho - log2 gamma) in bits.
// Directions where gamma vanishes must carry no rho weight (> 1e-9 raises
// SupportViolation); within that, the continuous extension 0 log 0 = 0 is
// used on both arguments.
double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& gamma);

// Output spectrum of the depolarizing channel on a pure input:
// one eigenvalue a + (1-a)/d and (d-1) copies of (1-a)/d (sorted).
std::vector<double> depol_output_spectrum(std::size_t d, double a);
double depol_reference_pnorm(std::size_t d, double a, double p);
double depol_reference_entropy(std::size_t d, double a);

// Positive partial transpose test for a bipartite (Choi) matrix; `ppt` uses
// the -1e-11 eigenvalue tolerance.
double pt_min_eigenvalue(const ComplexMatrix& choi, std::size_t d1, std::size_t d2);
bool is_ppt(const ComplexMatrix& choi, std::size_t d1, std::size_t d2);

struct AscentTrace {
  std::vector<double> objective;  // one value per iteration, non-decreasing
  std::size_t iterations = 0;
  bool converged = false;
};

struct PurityReport {
  double optimum_value = 0.0;
  ComplexMatrix argmax_state;  // pure density matrix achieving the optimum
  std::size_t starts_used = 0;
  std::vector<AscentTrace> traces;
};

// Maximal output p-norm over pure inputs via the multi-start fixed-point
// ascent psi <- top eigenvector of adjoint(Phi)(Phi(psi psi^dag)^{p-1}).
// p must exceed 1; p = infinity iterates with exponent 64 and reports the
// largest output eigenvalue.
PurityReport max_output_p_norm(const KrausChannel& phi, double p, std::size_t starts,
                               std::uint64_t seed, std::size_t max_iter = 2000);

// Minimal output entropy over pure inputs via the relative-entropy ascent
// with the maximally mixed reference; optimum_value is S_min in bits.
PurityReport min_output_entropy(const KrausChannel& phi, std::size_t starts, std::uint64_t seed,
                                std::size_t max_iter = 2000);

}  // namespace qchan
