#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "qchan/capacity.hpp"
#include "qchan/channel.hpp"
#include "qchan/eigen.hpp"
#include "qchan/errors.hpp"
#include "qchan/matrix.hpp"
#include "qchan/measures.hpp"
#include "qchan/rng.hpp"

using namespace qchan;
using qtest::frob_diff;
using qtest::scan_then_golden;

namespace {

ComplexMatrix plus_ket(int sign) {
  ComplexMatrix k(3, 1);
  const double s = 1.0 / std::sqrt(2.0);
  k(1, 0) = s;
  k(2, 0) = sign >= 0 ? s : -s;
  return k;
}

// weights (1-2x, x, x) on {e_0, e_+, e_-}: the one-parameter family the qutrit
// optimum lives in
Ensemble qutrit_axis_ensemble(double x) {
  Ensemble ens;
  ens.weights = {1.0 - 2.0 * x, x, x};
  ens.states = {projector(basis_ket(3, 0)), projector(plus_ket(+1)), projector(plus_ket(-1))};
  return ens;
}

// equal weights on the first m basis states and on the rest
Ensemble block_ensemble(std::size_t d, std::size_t m, double t_perp) {
  const double t = (1.0 - static_cast<double>(d - m) * t_perp) / static_cast<double>(m);
  Ensemble ens;
  for (std::size_t k = 0; k < d; ++k) {
    ens.weights.push_back(k < m ? t : t_perp);
    ens.states.push_back(projector(basis_ket(d, k)));
  }
  return ens;
}

// channel with qubit-block parameter lambda1 and total weight a, keeping the
// weights already in canonical order
KrausChannel qutrit_with_lambda(double a, double lambda1) {
  const double w01 = a * (1.0 + lambda1) / 4.0;
  const double w23 = a * (1.0 - lambda1) / 4.0;
  return build_qutrit(0.0, {w01, w01, w23, w23});
}

double ascent_residual(const KrausChannel& phi, const ComplexMatrix& reference,
                       const ComplexMatrix& psi) {
  const ComplexMatrix out = phi.apply(projector(psi));
  const ComplexMatrix g = phi.adjoint_apply(matrix_fn_psd(out, SpectralFn::log2()) -
                                            matrix_fn_psd(reference, SpectralFn::log2()));
  const ComplexMatrix gpsi = g * psi;
  const cplx rayleigh = inner(psi, gpsi);
  return ket_norm(gpsi - rayleigh * psi);
}

ComplexMatrix principal_ket(const ComplexMatrix& rho) {
  const HermitianEigen eig = hermitian_eigen(rho);
  ComplexMatrix psi(rho.rows(), 1);
  for (std::size_t i = 0; i < rho.rows(); ++i) psi(i, 0) = eig.eigenvectors(i, 0);
  return psi;
}

const QutritSpec kUnequalSpec = make_qutrit_spec(0.0, {0.35, 0.125, 0.075, 0.05});

}  // namespace

TEST_CASE("Ensemble::average and holevo_chi validation") {
  Ensemble ens;
  ens.weights = {0.25, 0.75};
  ens.states = {ComplexMatrix::diag({1.0, 0.0}), ComplexMatrix::diag({0.0, 1.0})};
  CHECK(frob_diff(ens.average(), ComplexMatrix::diag({0.25, 0.75})) == 0.0);

  const KrausChannel phi = build_depolarizing(2, 0.5);
  Ensemble bad = ens;
  bad.weights = {0.25};
  CHECK_THROWS_AS(holevo_chi(phi, bad), LengthMismatch);
  bad = ens;
  bad.weights = {0.6, 0.6};
  CHECK_THROWS_AS(holevo_chi(phi, bad), WeightsInvalid);
  bad = ens;
  bad.weights = {1.25, -0.25};
  CHECK_THROWS_AS(holevo_chi(phi, bad), WeightsInvalid);
}

TEST_CASE("holevo_chi: closed values and the relative-entropy identity") {
  const KrausChannel depol = build_depolarizing(3, 0.6);

  Ensemble single;
  single.weights = {1.0};
  single.states = {projector(basis_ket(3, 1))};
  CHECK(std::abs(holevo_chi(depol, single)) < 1e-14);

  Ensemble uniform;
  for (std::size_t k = 0; k < 3; ++k) {
    uniform.weights.push_back(1.0 / 3.0);
    uniform.states.push_back(projector(basis_ket(3, k)));
  }
  const double expected = std::log2(3.0) - depol_reference_entropy(3, 0.6);
  CHECK(holevo_chi(depol, uniform) == doctest::Approx(expected).epsilon(1e-11));

  // chi = S(Phi(avg)) - sum_j pi_j S(Phi(rho_j)) = sum_j pi_j H[Phi(rho_j), Phi(avg)]
  RngStream rng(211);
  const KrausChannel phi = build_channel(FamilySpec{kUnequalSpec});
  Ensemble ens;
  ens.weights = {0.5, 0.3, 0.2};
  for (int k = 0; k < 3; ++k) ens.states.push_back(qtest::random_state(3, rng));
  const ComplexMatrix avg_out = phi.apply(ens.average());
  double by_entropy = entropy(avg_out);
  double by_relent = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    by_entropy -= ens.weights[j] * entropy(phi.apply(ens.states[j]));
    by_relent += ens.weights[j] * relative_entropy(phi.apply(ens.states[j]), avg_out);
  }
  const double chi = holevo_chi(phi, ens);
  CHECK(chi == doctest::Approx(by_entropy).epsilon(1e-11));
  CHECK(chi == doctest::Approx(by_relent).epsilon(1e-11));
}

TEST_CASE("shor_ascent: depolarizing optimum from a random start") {
  const KrausChannel depol = build_depolarizing(3, 0.6);
  const ComplexMatrix mixed = (1.0 / 3.0) * ComplexMatrix::identity(3);
  RngStream rng(223);
  const StationaryReport rep = shor_ascent(depol, mixed, random_ket(3, rng));
  REQUIRE(rep.converged);
  const double expected = std::log2(3.0) - depol_reference_entropy(3, 0.6);
  CHECK(rep.objective == doctest::Approx(expected).epsilon(1e-9));
  CHECK(rep.top_eigenvalue == doctest::Approx(expected).epsilon(1e-8));
  CHECK(std::abs(rep.state.trace().real() - 1.0) < 1e-10);
  CHECK(hermitian_eigen(rep.state).eigenvalues.front() > 1.0 - 1e-10);
}

TEST_CASE("shor_ascent: stationary starts stop immediately, all starts stay below") {
  const KrausChannel phi = build_channel(FamilySpec{kUnequalSpec});
  const QutritEnsembleResult res = qutrit_optimal_ensemble(kUnequalSpec);
  const ComplexMatrix reference = phi.apply(res.ensemble.average());

  for (const ComplexMatrix& ket : {basis_ket(3, 0), plus_ket(+1), plus_ket(-1)}) {
    const StationaryReport rep = shor_ascent(phi, reference, ket);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(std::abs(rep.objective - res.c_star) < 1e-12);
  }

  RngStream rng(227);
  for (int s = 0; s < 50; ++s) {
    const StationaryReport rep = shor_ascent(phi, reference, random_ket(3, rng));
    REQUIRE(rep.converged);
    REQUIRE(rep.objective <= res.c_star + 1e-9);
    // recompute the stationarity residual from scratch at the endpoint
    REQUIRE(ascent_residual(phi, reference, principal_ket(rep.state)) < 1e-8);
    for (std::size_t t = 1; t < rep.trace.objective.size(); ++t)
      REQUIRE(rep.trace.objective[t] >= rep.trace.objective[t - 1] - 1e-12);
  }
}

TEST_CASE("shor_ascent: input validation") {
  const KrausChannel depol = build_depolarizing(3, 0.6);
  const ComplexMatrix mixed = (1.0 / 3.0) * ComplexMatrix::identity(3);
  CHECK_THROWS_AS(shor_ascent(depol, projector(basis_ket(3, 0)), basis_ket(3, 1)),
                  SupportViolation);
  CHECK_THROWS_AS(shor_ascent(depol, ComplexMatrix::identity(3), basis_ket(3, 1)), NotAState);
  CHECK_THROWS_AS(shor_ascent(depol, 0.5 * ComplexMatrix::identity(2), basis_ket(3, 1)),
                  DimensionMismatch);
  CHECK_THROWS_AS(shor_ascent(depol, mixed, basis_ket(2, 0)), DimensionMismatch);
  CHECK_THROWS_AS(shor_ascent(depol, mixed, ComplexMatrix(3, 1)), NotAState);
}

TEST_CASE("verify_candidate: the closed-form qutrit candidate survives") {
  const KrausChannel phi = build_channel(FamilySpec{kUnequalSpec});
  const QutritEnsembleResult res = qutrit_optimal_ensemble(kUnequalSpec);
  const ComplexMatrix avg_out = phi.apply(res.ensemble.average());

  const CapacityCertificate cert = verify_candidate(
      phi, avg_out, res.c_star, {StartRecipe::RandomPure}, StartDims{3, 0}, 24, 777);
  CHECK(cert.verified);
  CHECK(cert.worst_violation <= 1e-9);
  CHECK(cert.unconverged == 0);
  CHECK(cert.starts == 24);
  CHECK(cert.seed == 777);
  CHECK(!cert.best_challenger.has_value());
  CHECK(std::abs(cert.best_objective - res.c_star) < 1e-9);

  // the best challenger collapses onto an ensemble member
  double best_fid = 0.0;
  for (const ComplexMatrix& st : res.ensemble.states)
    best_fid = std::max(best_fid, (st * cert.best_state).trace().real());
  CHECK(best_fid > 1.0 - 1e-6);

  // deterministic for a fixed seed
  const CapacityCertificate again = verify_candidate(
      phi, avg_out, res.c_star, {StartRecipe::RandomPure}, StartDims{3, 0}, 24, 777);
  CHECK(again.worst_violation == cert.worst_violation);
  CHECK(again.best_objective == cert.best_objective);
  CHECK(again.iterations_max == cert.iterations_max);

  // an understated capacity is rejected with the violation measured
  const CapacityCertificate reject = verify_candidate(
      phi, avg_out, res.c_star - 0.01, {StartRecipe::RandomPure}, StartDims{3, 0}, 8, 777);
  CHECK(!reject.verified);
  CHECK(reject.worst_violation == doctest::Approx(0.01).epsilon(1e-3));
  REQUIRE(reject.best_challenger.has_value());
  CHECK(std::abs(reject.best_challenger->trace().real() - 1.0) < 1e-10);

  CHECK_THROWS_AS(verify_candidate(phi, avg_out, res.c_star, {}, StartDims{3, 0}, 8, 1),
                  BadRecipe);
  CHECK_THROWS_AS(verify_candidate(phi, avg_out, res.c_star, {StartRecipe::RandomPure},
                                   StartDims{4, 0}, 8, 1),
                  DimensionMismatch);
  CHECK_THROWS_AS(verify_candidate(phi, avg_out, res.c_star, {StartRecipe::RandomPure},
                                   StartDims{3, 0}, 0, 1),
                  OutOfRange);
}

TEST_CASE("verify_candidate: two copies of the doubly depolarizing channel") {
  const KrausChannel phi = build_doubly_depolarizing(4, 2, 0.7, 0.7);
  const DoublyDepolEnsembleResult res = doubly_depol_optimal_ensemble(4, 2, 0.7, 0.7);
  const ComplexMatrix avg_out = phi.apply(res.ensemble.average());
  const KrausChannel pair = tensor(phi, phi);

  const CapacityCertificate cert = verify_candidate(
      pair, kron(avg_out, avg_out), 2.0 * res.c_star,
      {StartRecipe::RandomPure, StartRecipe::MaxEntangledPhases, StartRecipe::ProductSum},
      StartDims{4, 4}, 12, 901);
  CHECK(cert.verified);
  CHECK(cert.unconverged == 0);
  CHECK(cert.worst_violation <= 1e-9);
}

TEST_CASE("qutrit_optimal_ensemble: degenerate weight, interior optimum, brute force") {
  // a fully degenerate qubit block pins the uniform ensemble exactly
  CHECK(qutrit_optimal_ensemble(0.6, 1.0).x == 1.0 / 3.0);
  CHECK(qutrit_optimal_ensemble(0.85, -1.0).x == 1.0 / 3.0);

  const QutritEnsembleResult res = qutrit_optimal_ensemble(0.6, 0.5);
  CHECK(res.x < 1.0 / 3.0);
  CHECK(res.a == 0.6);
  CHECK(res.lambda1 == 0.5);
  CHECK(res.delta_s > 0.0);
  CHECK(res.ensemble.weights[0] == doctest::Approx(1.0 - 2.0 * res.x).epsilon(1e-14));

  const double cases[4][2] = {{0.6, 0.9}, {0.5, 0.5}, {0.7, 0.2}, {0.8, 0.95}};
  for (const auto& c : cases) {
    const KrausChannel phi = qutrit_with_lambda(c[0], c[1]);
    auto chi = [&](double x) { return holevo_chi(phi, qutrit_axis_ensemble(x)); };
    const double x_brute = scan_then_golden(chi, 1e-6, 1.0 / 3.0 - 1e-12, 1e-4, 1e-10);
    const QutritEnsembleResult closed = qutrit_optimal_ensemble(c[0], c[1]);
    REQUIRE(std::abs(closed.x - x_brute) < 1e-6);
    REQUIRE(std::abs(closed.c_star - chi(x_brute)) < 1e-9);
    REQUIRE(holevo_chi(phi, closed.ensemble) == doctest::Approx(closed.c_star).epsilon(1e-11));
  }

  CHECK_THROWS_AS(qutrit_optimal_ensemble(1.2, 0.5), OutOfRange);
  CHECK_THROWS_AS(qutrit_optimal_ensemble(0.0, 0.5), OutOfRange);
  CHECK_THROWS_AS(qutrit_optimal_ensemble(0.6, 1.5), OutOfRange);
}

TEST_CASE("doubly_depol_optimal_ensemble: exact cases, reductions, brute force") {
  // b = 1 removes the inner noise distinction: uniform weights exactly
  const DoublyDepolEnsembleResult flat = doubly_depol_optimal_ensemble(4, 2, 0.7, 1.0);
  CHECK(flat.t == 0.25);
  CHECK(flat.t_perp == 0.25);

  // m = 1, d = 3 is the qutrit family in different clothes
  const DoublyDepolEnsembleResult d3 = doubly_depol_optimal_ensemble(3, 1, 0.6, 0.7);
  const QutritEnsembleResult q3 = qutrit_optimal_ensemble(0.6, 0.7);
  CHECK(std::abs(d3.t_perp - q3.x) < 1e-12);
  CHECK(std::abs(d3.c_star - q3.c_star) < 1e-12);

  // d = 2m closed form against the grid-plus-golden oracle
  {
    const KrausChannel phi = build_doubly_depolarizing(4, 2, 0.7, 0.6);
    auto chi = [&](double tp) { return holevo_chi(phi, block_ensemble(4, 2, tp)); };
    const double brute = scan_then_golden(chi, 1e-6, 0.5 - 1e-9, 1e-4, 1e-10);
    const DoublyDepolEnsembleResult res = doubly_depol_optimal_ensemble(4, 2, 0.7, 0.6);
    REQUIRE(std::abs(res.t_perp - brute) < 1e-6);
    REQUIRE(std::abs(res.c_star - chi(brute)) < 1e-9);
    CHECK(res.t == doctest::Approx((1.0 - 2.0 * res.t_perp) / 2.0).epsilon(1e-13));
    CHECK(res.ensemble.weights == std::vector<double>{res.t, res.t, res.t_perp, res.t_perp});
  }

  // d != 2m goes through the bisection branch
  {
    const KrausChannel phi = build_doubly_depolarizing(5, 2, 0.65, 0.4);
    auto chi = [&](double tp) { return holevo_chi(phi, block_ensemble(5, 2, tp)); };
    const double brute = scan_then_golden(chi, 1e-6, 1.0 / 3.0 - 1e-9, 1e-4, 1e-10);
    const DoublyDepolEnsembleResult res = doubly_depol_optimal_ensemble(5, 2, 0.65, 0.4);
    REQUIRE(std::abs(res.t_perp - brute) < 1e-6);
    REQUIRE(std::abs(res.c_star - chi(brute)) < 1e-9);
  }

  CHECK_THROWS_AS(doubly_depol_optimal_ensemble(2, 1, 0.5, 0.5), DimensionMismatch);
  CHECK_THROWS_AS(doubly_depol_optimal_ensemble(4, 3, 0.5, 0.5), BadPartition);
  CHECK_THROWS_AS(doubly_depol_optimal_ensemble(4, 2, 1.0, 0.5), OutOfRange);
  CHECK_THROWS_AS(doubly_depol_optimal_ensemble(4, 2, 0.5, -0.1), OutOfRange);
}

TEST_CASE("capacity sits strictly below the entropy bound away from degeneracy") {
  // unequal qutrit instance
  const QutritEnsembleResult res = qutrit_optimal_ensemble(kUnequalSpec);
  const double smin3 = depol_reference_entropy(3, 0.6);
  CHECK(std::log2(3.0) - smin3 - res.c_star > 1e-6);
  CHECK(frob_diff(res.ensemble.average(), (1.0 / 3.0) * ComplexMatrix::identity(3)) > 1e-4);

  // doubly depolarizing instance
  const DoublyDepolEnsembleResult dd = doubly_depol_optimal_ensemble(4, 2, 0.7, 0.6);
  const double smin4 = depol_reference_entropy(4, 0.7);
  CHECK(std::log2(4.0) - smin4 - dd.c_star > 1e-6);
  CHECK(frob_diff(dd.ensemble.average(), 0.25 * ComplexMatrix::identity(4)) > 1e-4);

  // degenerate case: the bound is attained and the average input is uniform
  const QutritEnsembleResult flat = qutrit_optimal_ensemble(0.6, 1.0);
  CHECK(std::abs(std::log2(3.0) - smin3 - flat.c_star) < 1e-12);
  CHECK(frob_diff(flat.ensemble.average(), (1.0 / 3.0) * ComplexMatrix::identity(3)) < 1e-14);
}

TEST_CASE("random_start: recipe shapes and invariants") {
  RngStream rng(229);

  const ComplexMatrix pure = random_start(StartRecipe::RandomPure, StartDims{5, 0}, rng);
  CHECK(pure.rows() == 5);
  CHECK(std::abs(ket_norm(pure) - 1.0) < 1e-14);

  const ComplexMatrix bi = random_start(StartRecipe::RandomBipartite, StartDims{3, 4}, rng);
  CHECK(bi.rows() == 12);
  CHECK(std::abs(ket_norm(bi) - 1.0) < 1e-14);

  // phase-entangled start: one amplitude of modulus 1/sqrt(d) per row block,
  // reduced states maximally mixed on both sides
  for (std::size_t d : {3, 4}) {
    const ComplexMatrix mep = random_start(StartRecipe::MaxEntangledPhases, StartDims{d, d}, rng);
    CHECK(std::abs(ket_norm(mep) - 1.0) < 1e-13);
    ComplexMatrix left(d, d), right(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
          left(i, j) += mep(i * d + k, 0) * std::conj(mep(j * d + k, 0));
          right(i, j) += mep(k * d + i, 0) * std::conj(mep(k * d + j, 0));
        }
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    CHECK(frob_diff(left, (amp * amp) * ComplexMatrix::identity(d)) < 1e-12);
    CHECK(frob_diff(right, (amp * amp) * ComplexMatrix::identity(d)) < 1e-12);
    std::size_t nonzero = 0;
    for (std::size_t idx = 0; idx < d * d; ++idx) {
      const double mag = std::abs(mep(idx, 0));
      if (mag > 1e-15) {
        ++nonzero;
        CHECK(mag == doctest::Approx(amp).epsilon(1e-13));
      }
    }
    CHECK(nonzero == d);
  }

  // product-sum start: the coefficient matrix is complex symmetric
  const ComplexMatrix ps = random_start(StartRecipe::ProductSum, StartDims{5, 5}, rng);
  CHECK(std::abs(ket_norm(ps) - 1.0) < 1e-14);
  ComplexMatrix coeff(5, 5);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t s = 0; s < 5; ++s) coeff(r, s) = ps(r * 5 + s, 0);
  CHECK(frob_diff(coeff, coeff.transpose()) < 1e-14);

  CHECK_THROWS_AS(random_start(StartRecipe::RandomPure, StartDims{0, 0}, rng), BadRecipe);
  CHECK_THROWS_AS(random_start(StartRecipe::RandomBipartite, StartDims{3, 0}, rng), BadRecipe);
  CHECK_THROWS_AS(random_start(StartRecipe::MaxEntangledPhases, StartDims{3, 4}, rng),
                  BadRecipe);
  CHECK_THROWS_AS(random_start(StartRecipe::ProductSum, StartDims{3, 2}, rng), BadRecipe);
}

TEST_CASE("cq_matrix: closed entries, stochasticity, custom bases") {
  // identity channel: the identity matrix
  const auto ident = cq_matrix(build_depolarizing(3, 1.0));
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(std::abs(ident[j][k] - (j == k ? 1.0 : 0.0)) < 1e-14);

  const double a = 0.7, b = 0.6;
  const KrausChannel dd = build_doubly_depolarizing(4, 2, a, b);
  const auto g = cq_matrix(dd);
  CHECK(g[0][0] == doctest::Approx(a + (1.0 - a) / 4.0).epsilon(1e-12));
  CHECK(g[2][2] ==
        doctest::Approx(a * b + a * (1.0 - b) / 2.0 + (1.0 - a) / 4.0).epsilon(1e-12));
  for (std::size_t k = 0; k < 4; ++k) {
    double col = 0.0, row = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      col += g[j][k];
      row += g[k][j];
    }
    CHECK(std::abs(col - 1.0) < 1e-11);  // trace preserving
    CHECK(std::abs(row - 1.0) < 1e-11);  // unital
  }

  // successive relabeling channel: diagonal entries carry the cascade weights
  const std::vector<double> x = {0.8, 0.7, 0.6};
  const KrausChannel succ = build_successive(4, x);
  const auto gs = cq_matrix(succ);
  for (std::size_t m0 = 0; m0 < 4; ++m0) {
    const ComplexMatrix out = succ.apply(projector(basis_ket(4, m0)));
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(gs[j][m0] - out(j, j).real()) < 1e-13);
  }

  // explicit standard basis reproduces the default
  std::vector<ComplexMatrix> std_basis;
  for (std::size_t k = 0; k < 4; ++k) std_basis.push_back(basis_ket(4, k));
  const auto g2 = cq_matrix(dd, std_basis);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < 4; ++k) CHECK(g2[j][k] == doctest::Approx(g[j][k]).epsilon(1e-14));

  // the qutrit axis basis diagonalizes the qutrit family outputs
  const KrausChannel phi = qutrit_with_lambda(0.6, 0.5);
  const std::vector<ComplexMatrix> axis = {basis_ket(3, 0), plus_ket(+1), plus_ket(-1)};
  const auto gq = cq_matrix(phi, axis);
  CHECK(gq[0][0] == doctest::Approx(0.6 + 0.4 / 3.0).epsilon(1e-12));
  CHECK(gq[1][1] == doctest::Approx(0.6 * 0.75 + 0.4 / 3.0).epsilon(1e-12));
  CHECK(gq[2][1] == doctest::Approx(0.6 * 0.25 + 0.4 / 3.0).epsilon(1e-12));

  std::vector<ComplexMatrix> short_basis = {basis_ket(4, 0), basis_ket(4, 1)};
  CHECK_THROWS_AS(cq_matrix(dd, short_basis), DimensionMismatch);
  std::vector<ComplexMatrix> skew = std_basis;
  skew[1] = 0.5 * skew[1];
  CHECK_THROWS_AS(cq_matrix(dd, skew), NotUnitary);
  skew = std_basis;
  skew[1] = skew[0];
  CHECK_THROWS_AS(cq_matrix(dd, skew), NotUnitary);
}

TEST_CASE("classical_capacity: known matrices and the family reductions") {
  const std::vector<std::vector<double>> noiseless = {
      {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  const ClassicalCapacityResult ideal = classical_capacity(noiseless);
  CHECK(ideal.capacity_bits == doctest::Approx(std::log2(3.0)).epsilon(1e-10));
  for (double w : ideal.input_distribution)
    CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-8));

  const std::vector<std::vector<double>> flat(3, std::vector<double>(3, 1.0 / 3.0));
  CHECK(classical_capacity(flat).capacity_bits < 1e-12);

  // doubly depolarizing reduction: iteration matches the closed form
  const KrausChannel dd = build_doubly_depolarizing(4, 2, 0.7, 0.6);
  const DoublyDepolEnsembleResult res = doubly_depol_optimal_ensemble(4, 2, 0.7, 0.6);
  const ClassicalCapacityResult ba = classical_capacity(cq_matrix(dd));
  CHECK(std::abs(ba.capacity_bits - res.c_star) < 1e-8);
  const std::vector<double> want = {res.t, res.t, res.t_perp, res.t_perp};
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(ba.input_distribution[k] - want[k]) < 1e-6);

  // qutrit reduction in the axis basis
  const KrausChannel phi = build_channel(FamilySpec{kUnequalSpec});
  const QutritEnsembleResult qres = qutrit_optimal_ensemble(kUnequalSpec);
  const std::vector<ComplexMatrix> axis = {basis_ket(3, 0), plus_ket(+1), plus_ket(-1)};
  const ClassicalCapacityResult qba = classical_capacity(cq_matrix(phi, axis));
  CHECK(std::abs(qba.capacity_bits - qres.c_star) < 1e-8);
  const std::vector<double> qwant = {1.0 - 2.0 * qres.x, qres.x, qres.x};
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(std::abs(qba.input_distribution[k] - qwant[k]) < 1e-6);

  CHECK_THROWS_AS(classical_capacity({{0.5, 0.5}, {0.4, 0.5}}), NotStochastic);
  CHECK_THROWS_AS(classical_capacity({{1.1, 0.0}, {-0.1, 1.0}}), NotStochastic);
  CHECK_THROWS_AS(classical_capacity({{1.0, 0.0}, {0.0}}), LengthMismatch);
  CHECK_THROWS_AS(classical_capacity({}), LengthMismatch);
}

TEST_CASE("diagonal family: capacity value and verified candidate") {
  CHECK(diagonal_family_capacity(3, 0.6) ==
        doctest::Approx(std::log2(3.0) - depol_reference_entropy(3, 0.6)).epsilon(1e-13));
  CHECK(diagonal_family_capacity(4, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(diagonal_family_capacity(3, 0.0) < 1e-13);
  CHECK_THROWS_AS(diagonal_family_capacity(3, 1.2), OutOfRange);

  DiagonalSpec spec;
  spec.d = 3;
  spec.weights = {0.3, 0.3};
  for (std::size_t k = 1; k <= 2; ++k) {
    std::vector<double> row(3);
    for (std::size_t m = 0; m < 3; ++m)
      row[m] = 2.0 * 3.14159265358979323846 * static_cast<double>(k * m) / 3.0;
    spec.phases.push_back(row);
  }
  const KrausChannel phi = build_diagonal(spec);
  const ComplexMatrix mixed = (1.0 / 3.0) * ComplexMatrix::identity(3);
  const CapacityCertificate cert =
      verify_candidate(phi, mixed, diagonal_family_capacity(3, 0.6),
                       {StartRecipe::RandomPure}, StartDims{3, 0}, 16, 331);
  CHECK(cert.verified);
  CHECK(cert.unconverged == 0);
}
