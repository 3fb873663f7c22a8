#include "qchan/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qchan/eigen.hpp"
#include "qchan/errors.hpp"
#include "qchan/rng.hpp"

namespace qchan {

namespace {

constexpr double kZeroEigen = 1e-15;     // below this, p log p is taken as 0
constexpr double kClampFloor = -1e-12;   // spectra may dip this far below 0
constexpr double kStateTol = 1e-9;       // PSD / trace-one tolerance for states
constexpr double kPartialSumTol = 1e-12;
constexpr double kAscentTol = 1e-13;

std::vector<double> state_eigenvalues(const ComplexMatrix& rho) {
  if (!rho.square()) throw NotAState("state must be a square matrix");
  if (!rho.is_hermitian(kStateTol)) throw NotAState("state must be Hermitian");
  HermitianEigen eig = hermitian_eigen(rho, kStateTol);
  for (double v : eig.eigenvalues) {
    if (v < -kStateTol) throw NotAState("state has a negative eigenvalue");
  }
  if (std::abs(rho.trace().real() - 1.0) > kStateTol) throw NotAState("state trace is not one");
  return eig.eigenvalues;
}

// Reconstruct sum_k f(lambda_k) v_k v_k^dagger from an eigendecomposition.
ComplexMatrix rebuild(const HermitianEigen& eig, const std::vector<double>& mapped) {
  const std::size_t n = eig.eigenvalues.size();
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

std::pair<double, ComplexMatrix> top_eigenpair(const ComplexMatrix& hermitian) {
  ComplexMatrix sym(hermitian.rows(), hermitian.cols());
  for (std::size_t i = 0; i < hermitian.rows(); ++i)
    for (std::size_t j = 0; j < hermitian.cols(); ++j)
      sym(i, j) = 0.5 * (hermitian(i, j) + std::conj(hermitian(j, i)));
  HermitianEigen eig = hermitian_eigen(sym, 1e-6);
  ComplexMatrix ket(hermitian.rows(), 1);
  for (std::size_t r = 0; r < hermitian.rows(); ++r) ket(r, 0) = eig.eigenvectors(r, 0);
  return {eig.eigenvalues.front(), std::move(ket)};
}

double pnorm_of_values(const std::vector<double>& vals, double p) {
  double s = 0.0;
  for (double v : vals) {
    if (v > 0.0) s += std::pow(v, p);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace

Spectrum Spectrum::from_state(const ComplexMatrix& rho) {
  return from_values(state_eigenvalues(rho));
}

Spectrum Spectrum::from_values(std::vector<double> vals) {
  for (double& v : vals) {
    if (v < kClampFloor) throw NegativeSpectrum("spectrum value below -1e-12");
    if (v < 0.0) v = 0.0;
  }
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  return Spectrum{std::move(vals)};
}

bool majorizes(const Spectrum& x, const Spectrum& y) {
  if (x.values.size() != y.values.size()) throw LengthMismatch("spectra differ in length");
  double px = 0.0;
  double py = 0.0;
  for (std::size_t k = 0; k < x.values.size(); ++k) {
    px += x.values[k];
    py += y.values[k];
    if (px < py - kPartialSumTol) return false;
  }
  return std::abs(px - py) <= kPartialSumTol;
}

bool submajorizes(const Spectrum& x, const Spectrum& y) {
  if (x.values.size() != y.values.size()) throw LengthMismatch("spectra differ in length");
  double px = 0.0;
  double py = 0.0;
  for (std::size_t k = 0; k < x.values.size(); ++k) {
    px += x.values[k];
    py += y.values[k];
    if (px < py - kPartialSumTol) return false;
  }
  return true;
}

double entropy_of_spectrum(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) {
    if (v > kZeroEigen) s -= v * std::log2(v);
  }
  return std::max(s, 0.0);
}

double entropy(const ComplexMatrix& rho) { return entropy_of_spectrum(state_eigenvalues(rho)); }

double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& gamma) {
  if (rho.rows() != gamma.rows()) throw DimensionMismatch("relative entropy dimension mismatch");
  std::vector<double> rho_vals = state_eigenvalues(rho);
  HermitianEigen geig = hermitian_eigen(gamma, kStateTol);
  for (double v : geig.eigenvalues) {
    if (v < -kStateTol) throw NotAState("second argument has a negative eigenvalue");
  }
  if (std::abs(gamma.trace().real() - 1.0) > kStateTol) {
    throw NotAState("second argument trace is not one");
  }

  const std::size_t d = rho.rows();
  double cross = 0.0;  // Tr rho log2 gamma
  for (std::size_t k = 0; k < d; ++k) {
    const double mu = geig.eigenvalues[k];
    // rho weight along this gamma eigendirection
    cplx w = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        w += std::conj(geig.eigenvectors(i, k)) * rho(i, j) * geig.eigenvectors(j, k);
    const double weight = w.real();
    if (mu <= kZeroEigen) {
      if (weight > 1e-9) throw SupportViolation("rho leaks outside the support of gamma");
      continue;
    }
    cross += weight * std::log2(mu);
  }
  double neg_s = 0.0;  // Tr rho log2 rho
  for (double v : rho_vals) {
    if (v > kZeroEigen) neg_s += v * std::log2(v);
  }
  return neg_s - cross;
}

std::vector<double> depol_output_spectrum(std::size_t d, double a) {
  if (d < 2) throw DimensionMismatch("depolarizing spectrum needs d >= 2");
  const double lo = -1.0 / static_cast<double>(d * d - 1);
  if (a < lo || a > 1.0) throw OutOfRange("depolarizing parameter outside CPT range");
  std::vector<double> s(d, (1.0 - a) / static_cast<double>(d));
  s[0] += a;
  std::sort(s.begin(), s.end(), std::greater<double>());
  return s;
}

double depol_reference_pnorm(std::size_t d, double a, double p) {
  if (p < 1.0) throw BadExponent("p-norm reference needs p >= 1");
  std::vector<double> s = depol_output_spectrum(d, a);
  if (std::isinf(p)) return s.front();
  return pnorm_of_values(s, p);
}

double depol_reference_entropy(std::size_t d, double a) {
  return entropy_of_spectrum(depol_output_spectrum(d, a));
}

double pt_min_eigenvalue(const ComplexMatrix& choi, std::size_t d1, std::size_t d2) {
  ComplexMatrix pt = partial_transpose(choi, d1, d2);
  HermitianEigen eig = hermitian_eigen(pt, 1e-8);
  return eig.eigenvalues.back();
}

bool is_ppt(const ComplexMatrix& choi, std::size_t d1, std::size_t d2) {
  return pt_min_eigenvalue(choi, d1, d2) >= -1e-11;
}

PurityReport max_output_p_norm(const KrausChannel& phi, double p, std::size_t starts,
                               std::uint64_t seed, std::size_t max_iter) {
  if (!(p > 1.0)) throw BadExponent("output p-norm ascent needs p > 1");
  if (starts == 0) throw OutOfRange("at least one start required");
  const bool infinite = std::isinf(p);
  const double p_eff = infinite ? 64.0 : p;
  const std::size_t d = phi.dim();

  PurityReport report;
  report.starts_used = starts;
  report.optimum_value = -std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < starts; ++s) {
    RngStream rng(seed, s);
    ComplexMatrix psi = random_ket(d, rng);
    AscentTrace trace;
    ComplexMatrix out;
    HermitianEigen out_eig;
    for (std::size_t it = 0; it < max_iter; ++it) {
      out = phi.apply(projector(psi));
      out_eig = hermitian_eigen(out, 1e-8);
      const double obj = pnorm_of_values(out_eig.eigenvalues, p_eff);
      trace.objective.push_back(obj);
      trace.iterations = it + 1;
      std::vector<double> mapped(out_eig.eigenvalues.size());
      for (std::size_t k = 0; k < mapped.size(); ++k) {
        const double v = std::max(out_eig.eigenvalues[k], 0.0);
        mapped[k] = v > 0.0 ? std::pow(v, p_eff - 1.0) : 0.0;
      }
      auto [top_value, top_ket] = top_eigenpair(phi.adjoint_apply(rebuild(out_eig, mapped)));
      // top_value >= |Phi(psi)|_p^p with equality only at a stationary point
      const double obj_pow = std::pow(obj, p_eff);
      if (top_value - obj_pow < kAscentTol * std::max(obj_pow, 1e-300)) {
        trace.converged = true;
        break;
      }
      psi = std::move(top_ket);
    }
    const double value =
        infinite ? std::max(out_eig.eigenvalues.front(), 0.0) : trace.objective.back();
    if (value > report.optimum_value) {
      report.optimum_value = value;
      report.argmax_state = projector(psi);
    }
    report.traces.push_back(std::move(trace));
  }
  return report;
}

PurityReport min_output_entropy(const KrausChannel& phi, std::size_t starts, std::uint64_t seed,
                                std::size_t max_iter) {
  if (starts == 0) throw OutOfRange("at least one start required");
  const std::size_t d = phi.dim();
  const double logd = std::log2(static_cast<double>(d));

  PurityReport report;
  report.starts_used = starts;
  double best_h = -std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < starts; ++s) {
    RngStream rng(seed, s);
    ComplexMatrix psi = random_ket(d, rng);
    AscentTrace trace;
    for (std::size_t it = 0; it < max_iter; ++it) {
      const ComplexMatrix out = phi.apply(projector(psi));
      HermitianEigen out_eig = hermitian_eigen(out, 1e-8);
      const double h = logd - entropy_of_spectrum(out_eig.eigenvalues);
      trace.objective.push_back(h);
      trace.iterations = it + 1;
      std::vector<double> logs(out_eig.eigenvalues.size());
      for (std::size_t k = 0; k < logs.size(); ++k) {
        logs[k] = std::log2(std::max(out_eig.eigenvalues[k], 1e-300));
      }
      auto [top_value, top_ket] = top_eigenpair(phi.adjoint_apply(rebuild(out_eig, logs)));
      // top_value >= -S(out) with equality only at a stationary point
      if (top_value - (h - logd) < kAscentTol) {
        trace.converged = true;
        break;
      }
      psi = std::move(top_ket);
    }
    if (trace.objective.back() > best_h) {
      best_h = trace.objective.back();
      report.argmax_state = projector(psi);
    }
    report.traces.push_back(std::move(trace));
  }
  report.optimum_value = logd - best_h;
  return report;
}

}  // namespace qchan
