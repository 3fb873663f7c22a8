#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qchan/matrix.hpp"

namespace qchan {

// ---------------------------------------------------------------------------
// Family descriptions. Every constructor below produces a KrausChannel and
// remembers which family it came from, so experiment code can recover
// parameters (and closed-form candidates) later.
// ---------------------------------------------------------------------------

struct DepolarizingSpec {
  std::size_t d = 0;
  double a = 0.0;  // admissible CPT range: -1/(d^2-1) <= a <= 1
};

struct GeneralizedSpec {
  std::size_t d = 0;
  std::vector<double> weights;           // strictly positive, sum < 1
  std::vector<ComplexMatrix> unitaries;  // one per weight
};

struct WeylSpec {
  std::size_t d = 0;
  std::vector<std::vector<double>> c;  // c[m][n] >= 0, summing to 1
};

struct DiagonalSpec {
  std::size_t d = 0;
  std::vector<double> weights;              // strictly positive, sum < 1
  std::vector<std::vector<double>> phases;  // phases[k][m] in radians
};

// Unitaries e^{i theta} |e_0><e_0| (+) sigma_k on span{e_1, e_2}. Weights are
// kept in the canonical non-increasing order; `permutation` records how the
// caller's weights were rearranged to get there.
struct QutritSpec {
  double theta = 0.0;
  std::array<double, 4> a{};  // a[0] >= a[1] >= a[2] >= a[3] >= 0, sum < 1
  std::array<std::size_t, 4> permutation{0, 1, 2, 3};
};

struct DoublyDepolarizingSpec {
  std::size_t d = 0;
  std::size_t m = 0;  // 1 <= m <= d - 2
  double a = 0.0;     // total unitary weight, 0 < a < 1
  double b = 0.0;     // inner depolarizing parameter, 0 <= b <= 1
};

struct SuccessiveSpec {
  std::size_t d = 0;
  std::vector<double> x;  // d - 1 levels, each in (0, 1)
};

struct ContractionSpec {
  std::size_t d = 0;
  std::vector<double> weights;              // strictly positive, sum < 1
  std::vector<ComplexMatrix> contractions;  // operator norm <= 1
};

using FamilySpec = std::variant<DepolarizingSpec, GeneralizedSpec, WeylSpec, DiagonalSpec,
                                QutritSpec, DoublyDepolarizingSpec, SuccessiveSpec,
                                ContractionSpec>;

std::string family_tag(const FamilySpec& spec);

// ---------------------------------------------------------------------------
// KrausChannel: a completely positive map given by its Kraus operators.
// Trace preservation is verified at construction (sum A^dag A = I within
// 1e-10); the contraction family is allowed to be sub-trace-preserving and is
// flagged accordingly. Channels built by tensor() keep per-factor operator
// lists so apply()/adjoint_apply() can run in two cheap stages instead of
// touching the full product Kraus set.
// ---------------------------------------------------------------------------
class KrausChannel {
 public:
  KrausChannel() = default;

  static KrausChannel from_kraus(std::vector<ComplexMatrix> ops, bool require_tp = true);

  std::size_t dim() const { return dim_; }
  const std::vector<ComplexMatrix>& kraus_ops() const { return kraus_; }
  bool trace_preserving() const { return trace_preserving_; }
  bool unital() const { return unital_; }

  const std::optional<FamilySpec>& family() const { return family_; }
  void set_family(FamilySpec spec) { family_ = std::move(spec); }

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  ComplexMatrix adjoint_apply(const ComplexMatrix& x) const;

  friend KrausChannel tensor(const KrausChannel& lhs, const KrausChannel& rhs);

 private:
  std::size_t dim_ = 0;
  std::vector<ComplexMatrix> kraus_;
  bool trace_preserving_ = false;
  bool unital_ = false;
  std::optional<FamilySpec> family_;
  // Two-stage application for tensor products: stage1 = {A_i (x) I},
  // stage2 = {I (x) B_j}. Empty for directly-built channels.
  std::vector<ComplexMatrix> stage1_;
  std::vector<ComplexMatrix> stage2_;
};

// Discrete Weyl (shift/clock) unitaries X^m Z^n, indexed by m*d + n, with
// X|e_l> = |e_{l+1 mod d}> and Z|e_l> = e^{2 pi i l / d}|e_l>.
std::vector<ComplexMatrix> weyl_operators(std::size_t d);

// Validate raw qutrit weights and put them in canonical non-increasing order,
// recording where each input position went.
QutritSpec make_qutrit_spec(double theta, const std::array<double, 4>& weights);

// Family constructors.
KrausChannel build_depolarizing(std::size_t d, double a);
KrausChannel build_generalized(const GeneralizedSpec& spec);
KrausChannel build_weyl_channel(const WeylSpec& spec);
KrausChannel build_diagonal(const DiagonalSpec& spec);
KrausChannel build_qutrit(double theta, std::array<double, 4> weights);
KrausChannel build_doubly_depolarizing(std::size_t d, std::size_t m, double a, double b);
KrausChannel build_successive(std::size_t d, const std::vector<double>& x);
KrausChannel build_contraction(const ContractionSpec& spec);

// Dispatch on the family tag.
KrausChannel build_channel(const FamilySpec& spec);

KrausChannel tensor(const KrausChannel& lhs, const KrausChannel& rhs);

// Choi matrix (I (x) Phi) applied to the maximally entangled projector,
// normalized to trace one for trace-preserving channels.
ComplexMatrix choi_matrix(const KrausChannel& phi);

// Max residual ||Phi(U rho U^dag) - U' Phi(rho) U'^dag||_F over the supplied
// group pairs and a fixed set of 10 pseudorandom full-rank states.
double check_covariance(const KrausChannel& phi, const std::vector<ComplexMatrix>& group_in,
                        const std::vector<ComplexMatrix>& group_out);

// Orthonormal spanning set of the maximal subspace on which every V_k acts
// as a phase. Returned kets are common eigenvectors of all V_k within tol.
std::vector<ComplexMatrix> common_eigenvectors(const std::vector<ComplexMatrix>& unitaries,
                                               double tol = 1e-8);

// Unital qubit channel parameters: lambda_i = 2(alpha_0 + alpha_i) - 1 for
// alphas on the probability simplex.
std::array<double, 3> qubit_lambdas(const std::array<double, 4>& alphas);

}  // namespace qchan
