#include "qchan/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qchan/eigen.hpp"
#include "qchan/errors.hpp"
#include "qchan/parallel.hpp"

namespace qchan {

namespace {

constexpr double kZeroEigen = 1e-15;
constexpr double kLogFloor = 1e-300;

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

HermitianEigen sym_eigen(const ComplexMatrix& m) {
  ComplexMatrix sym(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) sym(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return hermitian_eigen(sym, 1e-8);
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t += a(i, j) * b(j, i);
  return t.real();
}

}  // namespace

ComplexMatrix Ensemble::average() const {
  if (weights.size() != states.size()) throw LengthMismatch("one state per weight required");
  if (weights.empty()) throw WeightsInvalid("empty ensemble");
  ComplexMatrix avg(states.front().rows(), states.front().cols());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (states[k].rows() != avg.rows() || states[k].cols() != avg.cols())
      throw DimensionMismatch("ensemble states differ in shape");
    avg += weights[k] * states[k];
  }
  return avg;
}

StationaryReport shor_ascent(const KrausChannel& phi, const ComplexMatrix& reference,
                             const ComplexMatrix& start, std::size_t max_iter, double tol) {
  const std::size_t d = phi.dim();
  if (!reference.square() || reference.rows() != d)
    throw DimensionMismatch("reference dimension mismatch");
  if (!reference.is_hermitian(1e-9)) throw NotAState("reference must be Hermitian");
  if (std::abs(reference.trace().real() - 1.0) > 1e-9)
    throw NotAState("reference trace is not one");
  {
    HermitianEigen ref_eig = hermitian_eigen(reference, 1e-9);
    if (ref_eig.eigenvalues.back() <= 1e-12)
      throw SupportViolation("reference must have full support");
  }
  if (start.cols() != 1 || start.rows() != d) throw DimensionMismatch("start ket shape mismatch");
  const double nrm = ket_norm(start);
  if (!(nrm > 1e-12)) throw NotAState("start ket has negligible norm");
  ComplexMatrix psi = (1.0 / nrm) * start;

  const ComplexMatrix log2_ref = matrix_fn_psd(reference, SpectralFn::log2());

  StationaryReport report;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const ComplexMatrix out = phi.apply(projector(psi));
    HermitianEigen out_eig = hermitian_eigen(out, 1e-8);
    double neg_s = 0.0;
    for (double v : out_eig.eigenvalues) {
      if (v > kZeroEigen) neg_s += v * std::log2(v);
    }
    const double obj = neg_s - trace_product(out, log2_ref);
    report.trace.objective.push_back(obj);
    report.iterations = it + 1;

    std::vector<double> logs(out_eig.eigenvalues.size());
    for (std::size_t k = 0; k < logs.size(); ++k)
      logs[k] = std::log2(std::max(out_eig.eigenvalues[k], kLogFloor));
    HermitianEigen step = sym_eigen(phi.adjoint_apply(rebuild(out_eig, logs) - log2_ref));
    report.top_eigenvalue = step.eigenvalues.front();

    // Stationarity residual ||G psi - <psi|G|psi> psi|| of the current state,
    // expanded in the eigenbasis of the ascent operator G. The Rayleigh
    // quotient <psi|G|psi> equals the objective. Unlike the objective, which
    // flattens quadratically near the optimum, the residual keeps contracting
    // geometrically, so it can certify the fixed point far more tightly.
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      cplx c = 0.0;
      for (std::size_t r = 0; r < d; ++r) c += std::conj(step.eigenvectors(r, k)) * psi(r, 0);
      const double dev = step.eigenvalues[k] - obj;
      r2 += std::norm(c) * dev * dev;
    }
    const double resid = std::sqrt(r2);
    if (resid <= tol) {
      report.converged = true;
      break;
    }
    for (std::size_t r = 0; r < d; ++r) psi(r, 0) = step.eigenvectors(r, 0);
  }
  report.state = projector(psi);
  report.objective = report.trace.objective.back();
  report.trace.iterations = report.iterations;
  report.trace.converged = report.converged;
  return report;
}

ComplexMatrix random_start(StartRecipe recipe, StartDims dims, RngStream& rng) {
  switch (recipe) {
    case StartRecipe::RandomPure: {
      if (dims.total() == 0) throw BadRecipe("start needs a positive dimension");
      return random_ket(dims.total(), rng);
    }
    case StartRecipe::RandomBipartite: {
      if (dims.d1 == 0 || dims.d2 == 0) throw BadRecipe("bipartite start needs two factors");
      return random_ket(dims.d1 * dims.d2, rng);
    }
    case StartRecipe::MaxEntangledPhases: {
      if (dims.d1 == 0 || dims.d1 != dims.d2)
        throw BadRecipe("phase-entangled start needs equal factors");
      const std::size_t d = dims.d1;
      ComplexMatrix ket(d * d, 1);
      const double amp = 1.0 / std::sqrt(static_cast<double>(d));
      // Pairing of the two factors; for d = 4 the fixed shuffle below, else a
      // cyclic shift by ceil(d/2).
      static constexpr std::size_t kPairs4[4] = {2, 3, 1, 0};
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t j = (d == 4) ? kPairs4[i] : (i + (d + 1) / 2) % d;
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        ket(i * d + j, 0) = std::polar(amp, theta);
      }
      return ket;
    }
    case StartRecipe::ProductSum: {
      if (dims.d1 == 0 || dims.d1 != dims.d2)
        throw BadRecipe("product-sum start needs equal factors");
      const std::size_t d = dims.d1;
      for (;;) {
        ComplexMatrix ket(d * d, 1);
        for (std::size_t i = 0; i < d; ++i) {
          const ComplexMatrix phi_i = random_ket(d, rng);
          for (std::size_t r = 0; r < d; ++r)
            for (std::size_t s = 0; s < d; ++s) ket(r * d + s, 0) += phi_i(r, 0) * phi_i(s, 0);
        }
        const double nrm = ket_norm(ket);
        if (nrm > 1e-6) {
          ket *= 1.0 / nrm;
          return ket;
        }
      }
    }
  }
  throw BadRecipe("unknown start recipe");
}

CapacityCertificate verify_candidate(const KrausChannel& phi,
                                     const ComplexMatrix& candidate_avg_output,
                                     double candidate_capacity,
                                     const std::vector<StartRecipe>& recipes, StartDims dims,
                                     std::size_t starts, std::uint64_t seed, std::size_t max_iter,
                                     double violation_tol) {
  if (recipes.empty()) throw BadRecipe("at least one start recipe required");
  if (dims.total() != phi.dim()) throw DimensionMismatch("start dims must match channel dim");
  if (starts == 0) throw OutOfRange("at least one start required");

  std::vector<StationaryReport> reports(starts);
  parallel_for_index(starts, [&](std::size_t s) {
    RngStream rng(seed, s);
    const ComplexMatrix start = random_start(recipes[s % recipes.size()], dims, rng);
    reports[s] = shor_ascent(phi, candidate_avg_output, start, max_iter);
  });

  CapacityCertificate cert;
  cert.candidate_avg_output = candidate_avg_output;
  cert.candidate_capacity = candidate_capacity;
  cert.starts = starts;
  cert.seed = seed;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t s = 0; s < starts; ++s) {
    cert.iterations_max = std::max(cert.iterations_max, reports[s].iterations);
    if (!reports[s].converged) ++cert.unconverged;
    if (reports[s].objective > best) {
      best = reports[s].objective;
      best_idx = s;
    }
  }
  cert.best_objective = best;
  cert.best_state = reports[best_idx].state;
  cert.worst_violation = best - candidate_capacity;
  cert.verified = cert.worst_violation <= violation_tol;
  if (!cert.verified) cert.best_challenger = reports[best_idx].state;
  return cert;
}

double holevo_chi(const KrausChannel& phi, const Ensemble& ensemble) {
  if (ensemble.weights.size() != ensemble.states.size())
    throw LengthMismatch("one state per weight required");
  double sum = 0.0;
  for (double w : ensemble.weights) {
    if (w < -1e-12) throw WeightsInvalid("ensemble weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw WeightsInvalid("ensemble weights must sum to one");
  double chi = entropy(phi.apply(ensemble.average()));
  for (std::size_t k = 0; k < ensemble.weights.size(); ++k) {
    if (ensemble.weights[k] <= 0.0) continue;
    chi -= ensemble.weights[k] * entropy(phi.apply(ensemble.states[k]));
  }
  return chi;
}

QutritEnsembleResult qutrit_optimal_ensemble(double a, double lambda1) {
  if (!(a > 0.0) || !(a < 1.0)) throw OutOfRange("total unitary weight must lie in (0, 1)");
  if (std::abs(lambda1) > 1.0 + 1e-12) throw OutOfRange("lambda1 must lie in [-1, 1]");
  lambda1 = std::clamp(lambda1, -1.0, 1.0);

  const double bg = (1.0 - a) / 3.0;  // uniform background weight
  const std::vector<double> spec0 = {a + bg, bg, bg};
  const std::vector<double> spec1 = {a * (1.0 + lambda1) / 2.0 + bg,
                                     a * (1.0 - lambda1) / 2.0 + bg, bg};
  const double s0 = entropy_of_spectrum(spec0);
  const double s1 = entropy_of_spectrum(spec1);
  const double delta_s = s1 - s0;

  // The degenerate case collapses to the uniform weight exactly.
  double x;
  if (delta_s < 1e-15) {
    x = 1.0 / 3.0;
  } else {
    const double u = std::exp2(-delta_s / a);
    x = ((1.0 + 2.0 * a) * u - (1.0 - a)) / (3.0 * a * (1.0 + 2.0 * u));
  }
  if (!(x > 0.0) || x > 1.0 / 3.0 + 1e-12)
    throw OutOfRange("no interior stationary weight for these parameters");

  QutritEnsembleResult res;
  res.x = x;
  res.a = a;
  res.lambda1 = lambda1;
  res.delta_s = delta_s;

  const ComplexMatrix e0 = basis_ket(3, 0);
  ComplexMatrix plus(3, 1), minus(3, 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  plus(1, 0) = inv_sqrt2;
  plus(2, 0) = inv_sqrt2;
  minus(1, 0) = inv_sqrt2;
  minus(2, 0) = -inv_sqrt2;
  res.ensemble.weights = {1.0 - 2.0 * x, x, x};
  res.ensemble.states = {projector(e0), projector(plus), projector(minus)};

  const std::vector<double> avg = {a * (1.0 - 2.0 * x) + bg, a * x + bg, a * x + bg};
  res.c_star = entropy_of_spectrum(avg) - ((1.0 - 2.0 * x) * s0 + 2.0 * x * s1);
  return res;
}

QutritEnsembleResult qutrit_optimal_ensemble(const QutritSpec& spec) {
  const double a = spec.a[0] + spec.a[1] + spec.a[2] + spec.a[3];
  if (!(a > 0.0) || !(a < 1.0)) throw OutOfRange("total unitary weight must lie in (0, 1)");
  std::array<double, 4> alphas{};
  for (std::size_t k = 0; k < 4; ++k) alphas[k] = spec.a[k] / a;
  const std::array<double, 3> lambdas = qubit_lambdas(alphas);
  return qutrit_optimal_ensemble(a, lambdas[0]);
}

DoublyDepolEnsembleResult doubly_depol_optimal_ensemble(std::size_t d, std::size_t m, double a,
                                                        double b) {
  if (d < 3) throw DimensionMismatch("doubly depolarizing family needs d >= 3");
  if (m < 1 || m > d - 2) throw BadPartition("block split needs 1 <= m <= d - 2");
  if (!(a > 0.0) || !(a < 1.0)) throw OutOfRange("total unitary weight must lie in (0, 1)");
  if (b < 0.0 || b > 1.0) throw OutOfRange("inner parameter must lie in [0, 1]");

  const double dd = static_cast<double>(d);
  const double md = static_cast<double>(m);
  const double rest = static_cast<double>(d - m);
  const double bg = (1.0 - a) / dd;

  std::vector<double> spec_first(d, bg);
  spec_first[0] += a;
  std::vector<double> spec_last(d, bg);
  for (std::size_t k = 0; k < d - m; ++k) spec_last[k] += a * (1.0 - b) / rest;
  spec_last[0] += a * b;
  const double s_first = entropy_of_spectrum(spec_first);
  const double s_last = entropy_of_spectrum(spec_last);
  const double delta_s = s_last - s_first;

  double t;
  if (delta_s < 1e-15) {
    t = 1.0 / dd;
  } else if (d == 2 * m) {
    const double u = std::exp2(-delta_s / a);
    const double t_perp = (a * (1.0 + u) - (1.0 - u)) / (a * dd * (1.0 + u));
    t = (1.0 - rest * t_perp) / md;
  } else {
    // Stationarity in t: a log2[(a d t_perp + 1 - a)/(a d t + 1 - a)] + delta_s = 0
    // with t_perp = (1 - m t)/(d - m). Monotone decreasing in t, so bisect.
    auto f = [&](double tv) {
      const double tp = (1.0 - md * tv) / rest;
      return a * std::log2((a * dd * tp + 1.0 - a) / (a * dd * tv + 1.0 - a)) + delta_s;
    };
    double lo = 1.0 / dd;
    double hi = 1.0 / md;
    if (f(hi) > 0.0) throw NoConvergence("no interior stationary weight for these parameters");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > 0.0 ? lo : hi) = mid;
    }
    t = 0.5 * (lo + hi);
  }
  const double t_perp = (1.0 - md * t) / rest;

  DoublyDepolEnsembleResult res;
  res.t = t;
  res.t_perp = t_perp;
  res.delta_s = delta_s;
  res.ensemble.weights.reserve(d);
  res.ensemble.states.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    res.ensemble.weights.push_back(i < m ? t : t_perp);
    res.ensemble.states.push_back(projector(basis_ket(d, i)));
  }
  std::vector<double> avg(d, bg);
  for (std::size_t i = 0; i < d; ++i) avg[i] += a * (i < m ? t : t_perp);
  res.c_star = entropy_of_spectrum(avg) - (md * t * s_first + rest * t_perp * s_last);
  return res;
}

std::vector<std::vector<double>> cq_matrix(const KrausChannel& phi) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(phi.dim());
  for (std::size_t k = 0; k < phi.dim(); ++k) basis.push_back(basis_ket(phi.dim(), k));
  return cq_matrix(phi, basis);
}

std::vector<std::vector<double>> cq_matrix(const KrausChannel& phi,
                                           const std::vector<ComplexMatrix>& basis) {
  const std::size_t d = phi.dim();
  if (basis.size() != d) throw DimensionMismatch("basis must have one ket per dimension");
  for (std::size_t i = 0; i < d; ++i) {
    if (basis[i].cols() != 1 || basis[i].rows() != d)
      throw DimensionMismatch("basis kets must match channel dim");
    if (std::abs(ket_norm(basis[i]) - 1.0) > 1e-9) throw NotUnitary("basis kets must be unit");
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(inner(basis[i], basis[j])) > 1e-9)
        throw NotUnitary("basis kets must be orthogonal");
    }
  }
  std::vector<std::vector<double>> g(d, std::vector<double>(d, 0.0));
  for (std::size_t k = 0; k < d; ++k) {
    const ComplexMatrix out = phi.apply(projector(basis[k]));
    for (std::size_t j = 0; j < d; ++j) {
      const double v = inner(basis[j], out * basis[j]).real();
      g[j][k] = std::max(v, 0.0);
    }
  }
  return g;
}

ClassicalCapacityResult classical_capacity(const std::vector<std::vector<double>>& g, double tol) {
  const std::size_t n_out = g.size();
  if (n_out == 0) throw LengthMismatch("empty channel matrix");
  const std::size_t n_in = g.front().size();
  if (n_in == 0) throw LengthMismatch("empty channel matrix");
  for (const auto& row : g) {
    if (row.size() != n_in) throw LengthMismatch("ragged channel matrix");
  }
  for (std::size_t k = 0; k < n_in; ++k) {
    double col = 0.0;
    for (std::size_t j = 0; j < n_out; ++j) {
      if (g[j][k] < -1e-12) throw NotStochastic("negative transition probability");
      col += g[j][k];
    }
    if (std::abs(col - 1.0) > 1e-9) throw NotStochastic("columns must sum to one");
  }

  const double ln2 = std::numbers::ln2;
  std::vector<double> p(n_in, 1.0 / static_cast<double>(n_in));
  std::vector<double> q(n_out), c(n_in);
  ClassicalCapacityResult res;
  const std::size_t max_iter = 2000000;
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t j = 0; j < n_out; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_in; ++k) s += g[j][k] * p[k];
      q[j] = s;
    }
    double z = 0.0;
    double cmax = 0.0;
    for (std::size_t k = 0; k < n_in; ++k) {
      double e = 0.0;
      for (std::size_t j = 0; j < n_out; ++j) {
        if (g[j][k] > 0.0) e += g[j][k] * std::log(g[j][k] / std::max(q[j], kLogFloor));
      }
      c[k] = std::exp(e);
      z += p[k] * c[k];
      cmax = std::max(cmax, c[k]);
    }
    res.iterations = it + 1;
    const double lower = std::log(z) / ln2;
    const double upper = std::log(cmax) / ln2;
    if (upper - lower < tol) {
      res.capacity_bits = std::max(lower, 0.0);
      res.input_distribution = p;
      return res;
    }
    for (std::size_t k = 0; k < n_in; ++k) p[k] = p[k] * c[k] / z;
  }
  throw NoConvergence("capacity iteration did not reach the requested gap");
}

double diagonal_family_capacity(std::size_t d, double a) {
  if (a < 0.0 || a > 1.0) throw OutOfRange("identity weight must lie in [0, 1]");
  return std::log2(static_cast<double>(d)) - depol_reference_entropy(d, a);
}

}  // namespace qchan
