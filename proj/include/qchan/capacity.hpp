#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qchan/channel.hpp"
#include "qchan/matrix.hpp"
#include "qchan/measures.hpp"
#include "qchan/rng.hpp"

namespace qchan {

// Finite ensemble of input states with probability weights.
struct Ensemble {
  std::vector<double> weights;
  std::vector<ComplexMatrix> states;

  ComplexMatrix average() const;
};

// One relative-entropy ascent run: where it ended and how it got there.
struct StationaryReport {
  ComplexMatrix state;          // final input projector
  double objective = 0.0;      // H[Phi(state), reference] at the end
  double top_eigenvalue = 0.0; // largest eigenvalue of the final ascent operator
  std::size_t iterations = 0;
  bool converged = false;
  AscentTrace trace;
};

// Maximize H[Phi(psi psi^t), reference] over pure inputs by iterating
// psi <- top eigenvector of Phi^*[log2 Phi(psi psi^t) - log2 reference].
// Stops once the stationarity residual ||G psi - <psi|G|psi> psi|| of the
// ascent operator G falls below tol.
StationaryReport shor_ascent(const KrausChannel& phi, const ComplexMatrix& reference,
                             const ComplexMatrix& start, std::size_t max_iter = 2000,
                             double tol = 1e-9);

enum class StartRecipe { RandomPure, RandomBipartite, MaxEntangledPhases, ProductSum };

// d2 == 0 means single-copy starts; otherwise starts live on a d1*d2 product space.
struct StartDims {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::size_t total() const { return d2 == 0 ? d1 : d1 * d2; }
};

ComplexMatrix random_start(StartRecipe recipe, StartDims dims, RngStream& rng);

// Outcome of challenging a candidate (average output, capacity value) pair.
struct CapacityCertificate {
  ComplexMatrix candidate_avg_output;
  double candidate_capacity = 0.0;
  bool verified = false;
  double worst_violation = 0.0;  // max over starts of H[...] - candidate_capacity
  std::optional<ComplexMatrix> best_challenger;
  std::size_t starts = 0;
  std::uint64_t seed = 0;
  std::size_t iterations_max = 0;
  std::size_t unconverged = 0;  // starts that hit the iteration cap
  double best_objective = 0.0;
  ComplexMatrix best_state;
};

CapacityCertificate verify_candidate(const KrausChannel& phi,
                                     const ComplexMatrix& candidate_avg_output,
                                     double candidate_capacity,
                                     const std::vector<StartRecipe>& recipes, StartDims dims,
                                     std::size_t starts, std::uint64_t seed,
                                     std::size_t max_iter = 2000, double violation_tol = 1e-9);

// Holevo quantity of an input ensemble under the channel, in bits.
double holevo_chi(const KrausChannel& phi, const Ensemble& ensemble);

// Optimal basis-aligned ensemble for the qutrit family, via the closed form for x.
struct QutritEnsembleResult {
  double x = 0.0;
  Ensemble ensemble;
  double c_star = 0.0;
  double delta_s = 0.0;
  double lambda1 = 0.0;
  double a = 0.0;
};

QutritEnsembleResult qutrit_optimal_ensemble(double a, double lambda1);
QutritEnsembleResult qutrit_optimal_ensemble(const QutritSpec& spec);

// Optimal basis-aligned ensemble for the doubly depolarizing family.
struct DoublyDepolEnsembleResult {
  double t = 0.0;       // weight on each of the first m basis states
  double t_perp = 0.0;  // weight on each of the remaining d-m
  Ensemble ensemble;
  double c_star = 0.0;
  double delta_s = 0.0;
};

DoublyDepolEnsembleResult doubly_depol_optimal_ensemble(std::size_t d, std::size_t m, double a,
                                                        double b);

// Column-stochastic matrix g[j][k] = <b_j| Phi(|b_k><b_k|) |b_j> of the induced
// classical channel. The basis defaults to the standard one; a custom orthonormal
// basis is given as a list of kets.
std::vector<std::vector<double>> cq_matrix(const KrausChannel& phi);
std::vector<std::vector<double>> cq_matrix(const KrausChannel& phi,
                                           const std::vector<ComplexMatrix>& basis);

struct ClassicalCapacityResult {
  double capacity_bits = 0.0;
  std::vector<double> input_distribution;
  std::size_t iterations = 0;
};

// Blahut-Arimoto iteration on a column-stochastic matrix, capacity in bits.
ClassicalCapacityResult classical_capacity(const std::vector<std::vector<double>>& g,
                                           double tol = 1e-12);

// Capacity of any diagonal family member with identity weight a: the optimum is the
// uniform basis ensemble, so the value only depends on d and a.
double diagonal_family_capacity(std::size_t d, double a);

}  // namespace qchan
