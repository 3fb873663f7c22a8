#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "qchan/channel.hpp"
#include "qchan/eigen.hpp"
#include "qchan/errors.hpp"
#include "qchan/matrix.hpp"
#include "qchan/measures.hpp"
#include "qchan/rng.hpp"

using namespace qchan;
using qtest::frob_diff;
using qtest::random_state;
using qtest::random_unitary;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_simplex(std::size_t n, RngStream& rng) {
  std::vector<double> v(n);
  double total = 0.0;
  for (double& x : v) {
    x = -std::log(rng.uniform(1e-12, 1.0));
    total += x;
  }
  for (double& x : v) x /= total;
  return v;
}

std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(i)));
    std::swap(p[i - 1], p[std::min(j, i - 1)]);
  }
  return p;
}

double power_sum(const std::vector<double>& v, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, p);
  return s;
}

// weight of a density matrix inside the span of the first m basis vectors
double leading_block_weight(const ComplexMatrix& rho, std::size_t m) {
  double w = 0.0;
  for (std::size_t k = 0; k < m; ++k) w += rho(k, k).real();
  return w;
}

void check_monotone(const PurityReport& report) {
  for (const AscentTrace& trace : report.traces) {
    REQUIRE(trace.converged);
    for (std::size_t t = 1; t < trace.objective.size(); ++t)
      REQUIRE(trace.objective[t] >= trace.objective[t - 1] - 1e-12);
  }
}

void check_argmax_pure(const ComplexMatrix& rho) {
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
  const auto evs = hermitian_eigen(rho).eigenvalues;
  CHECK(evs.front() > 1.0 - 1e-10);
}

}  // namespace

TEST_CASE("Spectrum construction sorts and clamps") {
  const Spectrum s = Spectrum::from_values({0.3, -1e-13, 0.7});
  CHECK(s.values == std::vector<double>{0.7, 0.3, 0.0});
  CHECK_THROWS_AS(Spectrum::from_values({0.5, -1e-9}), NegativeSpectrum);

  ComplexMatrix rho = ComplexMatrix::diag({0.2, 0.5, 0.3});
  const Spectrum t = Spectrum::from_state(rho);
  CHECK(t.values[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t.values[2] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_THROWS_AS(Spectrum::from_state(ComplexMatrix::diag({0.7, 0.7})), NotAState);
}

TEST_CASE("majorizes: examples and the mixing characterization") {
  const Spectrum x = Spectrum::from_values({0.5, 0.3, 0.2});
  const Spectrum y = Spectrum::from_values({0.4, 0.35, 0.25});
  const Spectrum u = Spectrum::from_values({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(majorizes(x, y));
  CHECK(!majorizes(y, x));
  CHECK(majorizes(x, u));
  CHECK(majorizes(y, u));
  CHECK(majorizes(x, x));
  // unequal totals never majorize
  CHECK(!majorizes(Spectrum::from_values({0.5, 0.4}), Spectrum::from_values({0.5, 0.3})));
  CHECK_THROWS_AS(majorizes(x, Spectrum::from_values({1.0, 0.0})), LengthMismatch);

  // mixing permutations of x always lands below x, and the standard
  // consequences follow: larger power sums for x, smaller entropy for x
  RngStream rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
    const std::vector<double> base = random_simplex(n, rng);
    std::vector<double> mixed(n, 0.0);
    const std::vector<double> weights = random_simplex(3, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto perm = random_permutation(n, rng);
      for (std::size_t i = 0; i < n; ++i) mixed[i] += weights[k] * base[perm[i]];
    }
    const Spectrum xs = Spectrum::from_values(base);
    const Spectrum ys = Spectrum::from_values(mixed);
    REQUIRE(majorizes(xs, ys));
    for (double p : {1.5, 2.0, 3.0})
      REQUIRE(power_sum(xs.values, p) >= power_sum(ys.values, p) - 1e-12);
    REQUIRE(entropy_of_spectrum(xs.values) <= entropy_of_spectrum(ys.values) + 1e-12);
  }
}

TEST_CASE("submajorizes: examples and contraction conjugation") {
  CHECK(submajorizes(Spectrum::from_values({0.5, 0.3}), Spectrum::from_values({0.45, 0.25})));
  CHECK(!submajorizes(Spectrum::from_values({0.4, 0.3}), Spectrum::from_values({0.5, 0.1})));
  // majorization implies submajorization
  CHECK(submajorizes(Spectrum::from_values({0.5, 0.5, 0.0}),
                     Spectrum::from_values({0.4, 0.3, 0.3})));

  RngStream rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform(0.0, 3.0));
    const ComplexMatrix rho = random_state(d, rng);
    std::vector<double> scales(d);
    for (double& c : scales) c = rng.uniform(0.0, 1.0);
    const ComplexMatrix v =
        random_unitary(d, rng) * ComplexMatrix::diag(scales) * random_unitary(d, rng);
    const ComplexMatrix squeezed = v * rho * v.dagger();
    REQUIRE(submajorizes(Spectrum::from_state(rho),
                         Spectrum::from_values(hermitian_eigen(squeezed).eigenvalues)));
  }
}

TEST_CASE("entropy: closed values, bounds, validation") {
  RngStream rng(107);
  CHECK(entropy(projector(random_ket(4, rng))) < 1e-12);
  CHECK(entropy((1.0 / 3.0) * ComplexMatrix::identity(3)) ==
        doctest::Approx(std::log2(3.0)).epsilon(1e-13));
  const double h34 = -0.75 * std::log2(0.75) - 0.25 * std::log2(0.25);
  CHECK(entropy(ComplexMatrix::diag({0.75, 0.25})) == doctest::Approx(h34).epsilon(1e-13));
  CHECK(entropy_of_spectrum({0.5, 0.5, 0.0}) == doctest::Approx(1.0).epsilon(1e-13));

  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
    const double s = entropy(random_state(d, rng));
    REQUIRE(s >= -1e-12);
    REQUIRE(s <= std::log2(static_cast<double>(d)) + 1e-12);
  }

  CHECK_THROWS_AS(entropy(ComplexMatrix::diag({0.7, 0.7})), NotAState);
  ComplexMatrix skew(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(entropy(skew), NotAState);
}

TEST_CASE("relative_entropy: identities, Klein inequality, support rules") {
  RngStream rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform(0.0, 3.0));
    const ComplexMatrix rho = random_state(d, rng);
    REQUIRE(std::abs(relative_entropy(rho, rho)) < 1e-11);
    const ComplexMatrix mixed = (1.0 / static_cast<double>(d)) * ComplexMatrix::identity(d);
    REQUIRE(relative_entropy(rho, mixed) ==
            doctest::Approx(std::log2(static_cast<double>(d)) - entropy(rho)).epsilon(1e-11));
  }

  CHECK(relative_entropy(projector(basis_ket(2, 0)), ComplexMatrix::diag({0.75, 0.25})) ==
        doctest::Approx(-std::log2(0.75)).epsilon(1e-12));

  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng.uniform(0.0, 3.0));
    REQUIRE(relative_entropy(random_state(d, rng), random_state(d, rng)) >= -1e-11);
  }

  // support of rho must sit inside the support of gamma
  CHECK_THROWS_AS(relative_entropy(0.5 * ComplexMatrix::identity(2),
                                   projector(basis_ket(2, 0))),
                  SupportViolation);
  CHECK(std::abs(relative_entropy(projector(basis_ket(2, 0)), projector(basis_ket(2, 0)))) <
        1e-11);
  CHECK_THROWS_AS(relative_entropy(random_state(2, rng), random_state(3, rng)),
                  DimensionMismatch);
  CHECK_THROWS_AS(relative_entropy(random_state(2, rng), ComplexMatrix::diag({0.7, 0.7})),
                  NotAState);
}

TEST_CASE("depolarizing reference spectrum, p-norms, entropy") {
  const auto spec = depol_output_spectrum(3, 0.6);
  CHECK(spec[0] == doctest::Approx(0.6 + 0.4 / 3.0).epsilon(1e-14));
  CHECK(spec[1] == doctest::Approx(0.4 / 3.0).epsilon(1e-14));
  CHECK(spec[2] == doctest::Approx(0.4 / 3.0).epsilon(1e-14));
  // negative parameter flips the order
  const auto neg = depol_output_spectrum(3, -0.125);
  CHECK(neg.front() == doctest::Approx(1.125 / 3.0).epsilon(1e-14));
  CHECK(neg.back() == doctest::Approx(0.25).epsilon(1e-14));

  const double top = 0.6 + 0.4 / 3.0, rest = 0.4 / 3.0;
  CHECK(depol_reference_pnorm(3, 0.6, 2.0) ==
        doctest::Approx(std::sqrt(top * top + 2.0 * rest * rest)).epsilon(1e-14));
  CHECK(depol_reference_pnorm(3, 0.6, 1.5) ==
        doctest::Approx(std::pow(std::pow(top, 1.5) + 2.0 * std::pow(rest, 1.5), 2.0 / 3.0))
            .epsilon(1e-14));
  CHECK(depol_reference_pnorm(3, 0.6, kInf) == doctest::Approx(top).epsilon(1e-14));
  CHECK(depol_reference_pnorm(3, 0.6, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(depol_reference_entropy(3, 0.6) ==
        doctest::Approx(-top * std::log2(top) - 2.0 * rest * std::log2(rest)).epsilon(1e-14));

  // endpoint channels
  CHECK(depol_reference_pnorm(4, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(depol_reference_entropy(4, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(depol_reference_pnorm(3, 0.0, 2.0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(depol_reference_entropy(3, 0.0) == doctest::Approx(std::log2(3.0)).epsilon(1e-14));

  CHECK_THROWS_AS(depol_output_spectrum(3, 1.1), OutOfRange);
  CHECK_THROWS_AS(depol_output_spectrum(3, -0.2), OutOfRange);
  CHECK_THROWS_AS(depol_reference_pnorm(3, 0.6, 0.5), BadExponent);
  CHECK_THROWS_AS(depol_output_spectrum(1, 0.5), DimensionMismatch);
}

TEST_CASE("partial transpose of Choi matrices: entanglement boundary") {
  const ComplexMatrix ident_choi = choi_matrix(build_depolarizing(2, 1.0));
  CHECK(pt_min_eigenvalue(ident_choi, 2, 2) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(!is_ppt(ident_choi, 2, 2));

  const ComplexMatrix boundary = choi_matrix(build_depolarizing(2, 1.0 / 3.0));
  CHECK(std::abs(pt_min_eigenvalue(boundary, 2, 2)) < 1e-12);
  CHECK(is_ppt(boundary, 2, 2));

  CHECK(pt_min_eigenvalue(choi_matrix(build_depolarizing(2, 0.5)), 2, 2) < -1e-3);
  CHECK(!is_ppt(choi_matrix(build_depolarizing(2, 0.5)), 2, 2));
  CHECK(is_ppt(choi_matrix(build_depolarizing(2, 0.2)), 2, 2));

  CHECK_THROWS_AS(pt_min_eigenvalue(ident_choi, 3, 2), DimensionMismatch);
}

TEST_CASE("max_output_p_norm: identity channel and closed-form families") {
  const KrausChannel ident = build_depolarizing(2, 1.0);
  for (double p : {1.5, 2.0, kInf}) {
    const PurityReport rep = max_output_p_norm(ident, p, 4, 11);
    CHECK(rep.optimum_value == doctest::Approx(1.0).epsilon(1e-12));
    check_monotone(rep);
  }

  const KrausChannel qutrit = build_qutrit(0.1, {0.3, 0.15, 0.1, 0.05});
  for (double p : {1.5, 2.0, kInf}) {
    const PurityReport rep = max_output_p_norm(qutrit, p, 10, 12);
    REQUIRE(std::abs(rep.optimum_value - depol_reference_pnorm(3, 0.6, p)) < 1e-8);
    check_monotone(rep);
    check_argmax_pure(rep.argmax_state);
    CHECK(std::abs(schatten_norm(qutrit.apply(rep.argmax_state), p) - rep.optimum_value) <
          1e-9);
    CHECK(rep.starts_used == 10);
  }

  const KrausChannel dd = build_doubly_depolarizing(4, 2, 0.7, 0.6);
  const PurityReport rep = max_output_p_norm(dd, 2.0, 10, 13);
  REQUIRE(std::abs(rep.optimum_value - depol_reference_pnorm(4, 0.7, 2.0)) < 1e-8);
  check_argmax_pure(rep.argmax_state);
  // the maximizer lives in the doubly-noised leading block
  CHECK(leading_block_weight(rep.argmax_state, 2) > 1.0 - 1e-6);

  CHECK_THROWS_AS(max_output_p_norm(qutrit, 1.0, 4, 1), BadExponent);
  CHECK_THROWS_AS(max_output_p_norm(qutrit, 2.0, 0, 1), OutOfRange);
}

TEST_CASE("min_output_entropy: identity channel and closed-form families") {
  const PurityReport triv = min_output_entropy(build_depolarizing(2, 1.0), 4, 17);
  CHECK(std::abs(triv.optimum_value) < 1e-12);
  check_monotone(triv);

  const KrausChannel qutrit = build_qutrit(0.0, {0.3, 0.15, 0.1, 0.05});
  const PurityReport qrep = min_output_entropy(qutrit, 10, 18);
  REQUIRE(std::abs(qrep.optimum_value - depol_reference_entropy(3, 0.6)) < 1e-8);
  check_monotone(qrep);
  check_argmax_pure(qrep.argmax_state);
  CHECK(std::abs(entropy(qutrit.apply(qrep.argmax_state)) - qrep.optimum_value) < 1e-9);
  // the qutrit minimizer is the e_0 axis
  CHECK(leading_block_weight(qrep.argmax_state, 1) > 1.0 - 1e-6);

  const KrausChannel dd = build_doubly_depolarizing(4, 2, 0.7, 0.6);
  const PurityReport drep = min_output_entropy(dd, 10, 19);
  REQUIRE(std::abs(drep.optimum_value - depol_reference_entropy(4, 0.7)) < 1e-8);
  CHECK(leading_block_weight(drep.argmax_state, 2) > 1.0 - 1e-6);

  CHECK_THROWS_AS(min_output_entropy(qutrit, 0, 1), OutOfRange);
}

TEST_CASE("two copies: multiplicative 2-norm and additive min entropy") {
  const KrausChannel phi = build_qutrit(0.0, {0.3, 0.15, 0.1, 0.05});
  const KrausChannel pair = tensor(phi, phi);

  const double nu2 = max_output_p_norm(phi, 2.0, 10, 23).optimum_value;
  const double nu2_pair = max_output_p_norm(pair, 2.0, 16, 24).optimum_value;
  CHECK(std::abs(nu2_pair - nu2 * nu2) < 1e-7);

  const double smin = min_output_entropy(phi, 10, 25).optimum_value;
  const double smin_pair = min_output_entropy(pair, 16, 26).optimum_value;
  CHECK(std::abs(smin_pair - 2.0 * smin) < 1e-7);
}
