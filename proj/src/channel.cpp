#include "qchan/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "qchan/eigen.hpp"
#include "qchan/errors.hpp"
#include "qchan/rng.hpp"

namespace qchan {

namespace {

constexpr double kCompletenessTol = 1e-10;

void check_same_square(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) throw DimensionMismatch("channel needs at least one Kraus operator");
  const std::size_t d = ops.front().rows();
  for (const ComplexMatrix& k : ops) {
    if (!k.square() || k.rows() != d) throw DimensionMismatch("Kraus operators must share one square shape");
    if (!k.is_finite()) throw Error("non-finite Kraus entry");
  }
}

ComplexMatrix kraus_gram(const std::vector<ComplexMatrix>& ops, bool adjoint_side) {
  const std::size_t d = ops.front().rows();
  ComplexMatrix s(d, d);
  for (const ComplexMatrix& k : ops) {
    s += adjoint_side ? k * k.dagger() : k.dagger() * k;
  }
  return s;
}

std::vector<ComplexMatrix> noise_kraus(std::size_t d, double weight) {
  // Rank-one set realizing rho -> weight * d * (Tr rho) I / d ... i.e. with
  // weight = (1-a)/d the family adds (1-a)(Tr rho) I/d.
  std::vector<ComplexMatrix> ops;
  ops.reserve(d * d);
  const double r = std::sqrt(weight);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix k(d, d);
      k(i, j) = r;
      ops.push_back(k);
    }
  return ops;
}

void require_unit_weightsum_below_one(const std::vector<double>& weights) {
  if (weights.empty()) throw WeightsInvalid("at least one weight required");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw WeightsInvalid("weights must be strictly positive");
    sum += w;
  }
  if (!(sum < 1.0)) throw WeightsInvalid("weights must sum to less than one");
}

void require_unitary(const ComplexMatrix& v, double tol) {
  ComplexMatrix g = v.dagger() * v;
  g -= ComplexMatrix::identity(v.rows());
  if (g.frobenius_norm() > tol) throw NotUnitary("operator is not unitary within tolerance");
}

const ComplexMatrix& pauli(std::size_t k) {
  static const std::array<ComplexMatrix, 4> sigmas = [] {
    std::array<ComplexMatrix, 4> s{ComplexMatrix(2, 2), ComplexMatrix(2, 2), ComplexMatrix(2, 2),
                                   ComplexMatrix(2, 2)};
    s[0](0, 0) = 1.0;
    s[0](1, 1) = 1.0;
    s[1](0, 1) = 1.0;
    s[1](1, 0) = 1.0;
    s[2](0, 1) = cplx(0.0, -1.0);
    s[2](1, 0) = cplx(0.0, 1.0);
    s[3](0, 0) = 1.0;
    s[3](1, 1) = -1.0;
    return s;
  }();
  return sigmas[k];
}

// Weighted unitary set realizing the conjugation part of the successive
// construction on dimension n. `xs` holds the parameters of the embedded
// (n-1)-dimensional channel (so xs.size() == n - 2 for n >= 2). Each level
// mixes the recursive set with the (n-1)-dimensional Weyl unitaries, folding
// the level's isotropic noise into the mixture, and embeds the products
// below a fixed first coordinate.
std::vector<std::pair<double, ComplexMatrix>> successive_unitary_set(std::size_t n,
                                                                     const double* xs,
                                                                     std::size_t nxs) {
  if (n == 1) return {{1.0, ComplexMatrix::identity(1)}};
  if (n == 2) return {{1.0, ComplexMatrix::identity(2)}};
  const double x = xs[0];
  const auto inner = successive_unitary_set(n - 1, xs + 1, nxs - 1);
  const auto weyl = weyl_operators(n - 1);
  const double cell = (1.0 - x) / static_cast<double>((n - 1) * (n - 1));
  const ComplexMatrix one = ComplexMatrix::identity(1);
  std::vector<std::pair<double, ComplexMatrix>> out;
  out.reserve(weyl.size() * inner.size());
  for (std::size_t p = 0; p < weyl.size(); ++p) {
    const double wp = (p == 0) ? x + cell : cell;
    for (const auto& [v, w] : inner) {
      out.emplace_back(wp * v, direct_sum(one, weyl[p] * w));
    }
  }
  return out;
}

}  // namespace

std::string family_tag(const FamilySpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DepolarizingSpec>) return "depolarizing";
        if constexpr (std::is_same_v<T, GeneralizedSpec>) return "generalized";
        if constexpr (std::is_same_v<T, WeylSpec>) return "weyl";
        if constexpr (std::is_same_v<T, DiagonalSpec>) return "diagonal";
        if constexpr (std::is_same_v<T, QutritSpec>) return "qutrit";
        if constexpr (std::is_same_v<T, DoublyDepolarizingSpec>) return "doubly_depolarizing";
        if constexpr (std::is_same_v<T, SuccessiveSpec>) return "successive";
        if constexpr (std::is_same_v<T, ContractionSpec>) return "contraction";
      },
      spec);
}

KrausChannel KrausChannel::from_kraus(std::vector<ComplexMatrix> ops, bool require_tp) {
  check_same_square(ops);
  const std::size_t d = ops.front().rows();

  KrausChannel ch;
  ch.dim_ = d;
  ch.kraus_ = std::move(ops);

  ComplexMatrix s = kraus_gram(ch.kraus_, false);
  ComplexMatrix s_minus_id = s;
  s_minus_id -= ComplexMatrix::identity(d);
  ch.trace_preserving_ = s_minus_id.frobenius_norm() <= kCompletenessTol;
  if (require_tp && !ch.trace_preserving_) {
    throw WeightsInvalid("Kraus operators are not trace-preserving within tolerance");
  }
  if (!ch.trace_preserving_) {
    HermitianEigen eig = hermitian_eigen(s, 1e-8);
    if (eig.eigenvalues.front() > 1.0 + kCompletenessTol) {
      throw OutOfRange("Kraus operators exceed trace preservation");
    }
  }
  ComplexMatrix u = kraus_gram(ch.kraus_, true);
  u -= ComplexMatrix::identity(d);
  ch.unital_ = u.frobenius_norm() <= kCompletenessTol;
  return ch;
}

ComplexMatrix KrausChannel::apply(const ComplexMatrix& rho) const {
  if (!rho.square() || rho.rows() != dim_) throw DimensionMismatch("state dimension mismatch");
  const auto sum_conj = [](const std::vector<ComplexMatrix>& ops, const ComplexMatrix& m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (const ComplexMatrix& k : ops) out += k * m * k.dagger();
    return out;
  };
  if (!stage1_.empty()) return sum_conj(stage2_, sum_conj(stage1_, rho));
  return sum_conj(kraus_, rho);
}

ComplexMatrix KrausChannel::adjoint_apply(const ComplexMatrix& x) const {
  if (!x.square() || x.rows() != dim_) throw DimensionMismatch("observable dimension mismatch");
  const auto sum_conj_adj = [](const std::vector<ComplexMatrix>& ops, const ComplexMatrix& m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (const ComplexMatrix& k : ops) out += k.dagger() * m * k;
    return out;
  };
  if (!stage1_.empty()) return sum_conj_adj(stage1_, sum_conj_adj(stage2_, x));
  return sum_conj_adj(kraus_, x);
}

std::vector<ComplexMatrix> weyl_operators(std::size_t d) {
  if (d == 0) throw DimensionMismatch("Weyl set needs d >= 1");
  ComplexMatrix x(d, d);
  for (std::size_t l = 0; l < d; ++l) x((l + 1) % d, l) = 1.0;
  ComplexMatrix z(d, d);
  for (std::size_t l = 0; l < d; ++l) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(d);
    z(l, l) = cplx(std::cos(phi), std::sin(phi));
  }
  std::vector<ComplexMatrix> out;
  out.reserve(d * d);
  ComplexMatrix xm = ComplexMatrix::identity(d);
  for (std::size_t m = 0; m < d; ++m) {
    ComplexMatrix op = xm;
    for (std::size_t n = 0; n < d; ++n) {
      out.push_back(op);
      op = op * z;
    }
    xm = x * xm;
  }
  return out;
}

KrausChannel build_depolarizing(std::size_t d, double a) {
  if (d < 2) throw DimensionMismatch("depolarizing channel needs d >= 2");
  const double lo = -1.0 / static_cast<double>(d * d - 1);
  if (a < lo || a > 1.0) throw OutOfRange("depolarizing parameter outside CPT range");

  std::vector<ComplexMatrix> ops;
  if (a >= 0.0) {
    ComplexMatrix id = ComplexMatrix::identity(d);
    id *= std::sqrt(a);
    ops.push_back(id);
    if (a < 1.0) {
      auto noise = noise_kraus(d, (1.0 - a) / static_cast<double>(d));
      ops.insert(ops.end(), noise.begin(), noise.end());
    }
  } else {
    // Negative-a region: mixture of Weyl conjugations with the identity
    // coefficient a + (1-a)/d^2 and (1-a)/d^2 on the rest.
    const double rest = (1.0 - a) / static_cast<double>(d * d);
    const auto weyl = weyl_operators(d);
    for (std::size_t i = 0; i < weyl.size(); ++i) {
      const double c = (i == 0) ? a + rest : rest;
      ComplexMatrix k = weyl[i];
      k *= std::sqrt(c);
      ops.push_back(k);
    }
  }
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops));
  ch.set_family(DepolarizingSpec{d, a});
  return ch;
}

KrausChannel build_generalized(const GeneralizedSpec& spec) {
  if (spec.d < 2) throw DimensionMismatch("generalized channel needs d >= 2");
  if (spec.weights.size() != spec.unitaries.size()) {
    throw LengthMismatch("one unitary per weight required");
  }
  require_unit_weightsum_below_one(spec.weights);
  double a = 0.0;
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < spec.weights.size(); ++k) {
    const ComplexMatrix& v = spec.unitaries[k];
    if (!v.square() || v.rows() != spec.d) throw DimensionMismatch("unitary dimension mismatch");
    require_unitary(v, 1e-10);
    ComplexMatrix op = v;
    op *= std::sqrt(spec.weights[k]);
    ops.push_back(op);
    a += spec.weights[k];
  }
  auto noise = noise_kraus(spec.d, (1.0 - a) / static_cast<double>(spec.d));
  ops.insert(ops.end(), noise.begin(), noise.end());
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops));
  ch.set_family(spec);
  return ch;
}

KrausChannel build_weyl_channel(const WeylSpec& spec) {
  if (spec.d < 2) throw DimensionMismatch("Weyl channel needs d >= 2");
  if (spec.c.size() != spec.d) throw LengthMismatch("coefficient table must be d x d");
  double sum = 0.0;
  for (const auto& row : spec.c) {
    if (row.size() != spec.d) throw LengthMismatch("coefficient table must be d x d");
    for (double c : row) {
      if (c < 0.0) throw WeightsInvalid("Weyl coefficients must be non-negative");
      sum += c;
    }
  }
  if (std::abs(sum - 1.0) > 1e-10) throw WeightsInvalid("Weyl coefficients must sum to one");

  const auto weyl = weyl_operators(spec.d);
  std::vector<ComplexMatrix> ops;
  for (std::size_t m = 0; m < spec.d; ++m)
    for (std::size_t n = 0; n < spec.d; ++n) {
      const double c = spec.c[m][n];
      if (c <= 0.0) continue;
      ComplexMatrix k = weyl[m * spec.d + n];
      k *= std::sqrt(c);
      ops.push_back(k);
    }
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops));
  ch.set_family(spec);
  return ch;
}

KrausChannel build_diagonal(const DiagonalSpec& spec) {
  if (spec.d < 2) throw DimensionMismatch("diagonal channel needs d >= 2");
  if (spec.weights.size() != spec.phases.size()) throw LengthMismatch("one phase row per weight");
  require_unit_weightsum_below_one(spec.weights);
  double a = 0.0;
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < spec.weights.size(); ++k) {
    if (spec.phases[k].size() != spec.d) throw LengthMismatch("phase row length must equal d");
    std::vector<cplx> diag(spec.d);
    for (std::size_t m = 0; m < spec.d; ++m) {
      diag[m] = cplx(std::cos(spec.phases[k][m]), std::sin(spec.phases[k][m]));
    }
    ComplexMatrix v = ComplexMatrix::diag_complex(diag);
    v *= std::sqrt(spec.weights[k]);
    ops.push_back(v);
    a += spec.weights[k];
  }
  auto noise = noise_kraus(spec.d, (1.0 - a) / static_cast<double>(spec.d));
  ops.insert(ops.end(), noise.begin(), noise.end());
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops));
  ch.set_family(spec);
  return ch;
}

QutritSpec make_qutrit_spec(double theta, const std::array<double, 4>& weights) {
  double a = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw WeightsInvalid("qutrit weights must be non-negative");
    a += w;
  }
  if (!(a > 0.0) || !(a < 1.0)) throw WeightsInvalid("qutrit weight sum must lie in (0, 1)");

  // Canonical ordering a_0 >= a_1 >= a_2 >= a_3 (relabeling the sigma_k is a
  // unitary change of basis); remember where each input weight went.
  std::array<std::size_t, 4> perm{0, 1, 2, 3};
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t i, std::size_t j) { return weights[i] > weights[j]; });
  std::array<double, 4> sorted{};
  for (std::size_t k = 0; k < 4; ++k) sorted[k] = weights[perm[k]];
  return QutritSpec{theta, sorted, perm};
}

KrausChannel build_qutrit(double theta, std::array<double, 4> weights) {
  const QutritSpec spec = make_qutrit_spec(theta, weights);
  const double a = spec.a[0] + spec.a[1] + spec.a[2] + spec.a[3];

  const cplx phase(std::cos(theta), std::sin(theta));
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < 4; ++k) {
    if (spec.a[k] <= 0.0) continue;
    ComplexMatrix one(1, 1);
    one(0, 0) = phase;
    ComplexMatrix v = direct_sum(one, pauli(k));
    v *= std::sqrt(spec.a[k]);
    ops.push_back(v);
  }
  auto noise = noise_kraus(3, (1.0 - a) / 3.0);
  ops.insert(ops.end(), noise.begin(), noise.end());
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops));
  ch.set_family(spec);
  return ch;
}

KrausChannel build_doubly_depolarizing(std::size_t d, std::size_t m, double a, double b) {
  if (d < 3) throw DimensionMismatch("doubly depolarizing channel needs d >= 3");
  if (m < 1 || m > d - 2) throw BadPartition("block split needs 1 <= m <= d - 2");
  if (!(a > 0.0) || !(a < 1.0)) throw OutOfRange("total unitary weight must lie in (0, 1)");
  if (b < 0.0 || b > 1.0) throw OutOfRange("inner parameter must lie in [0, 1]");

  const std::size_t r = d - m;
  const double r2 = static_cast<double>(r * r);
  const double a0 = a * (b * r2 + (1.0 - b)) / r2;
  const double ak = a * (1.0 - b) / r2;

  const auto weyl = weyl_operators(r);
  const ComplexMatrix em = ComplexMatrix::identity(m);
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < weyl.size(); ++k) {
    const double w = (k == 0) ? a0 : ak;
    if (w <= 0.0) continue;
    ComplexMatrix v = direct_sum(em, weyl[k]);
    v *= std::sqrt(w);
    ops.push_back(v);
  }
  auto noise = noise_kraus(d, (1.0 - a) / static_cast<double>(d));
  ops.insert(ops.end(), noise.begin(), noise.end());
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops));
  ch.set_family(DoublyDepolarizingSpec{d, m, a, b});
  return ch;
}

KrausChannel build_successive(std::size_t d, const std::vector<double>& x) {
  if (d < 2) throw DimensionMismatch("successive channel needs d >= 2");
  if (x.size() != d - 1) throw LengthMismatch("successive channel needs d - 1 parameters");
  for (double v : x) {
    if (!(v > 0.0) || !(v < 1.0)) throw OutOfRange("successive parameters must lie in (0, 1)");
  }
  const auto unitary_part = successive_unitary_set(d, x.data() + 1, x.size() - 1);
  std::vector<ComplexMatrix> ops;
  ops.reserve(unitary_part.size() + d * d);
  for (const auto& [w, v] : unitary_part) {
    ComplexMatrix k = v;
    k *= std::sqrt(x[0] * w);
    ops.push_back(k);
  }
  auto noise = noise_kraus(d, (1.0 - x[0]) / static_cast<double>(d));
  ops.insert(ops.end(), noise.begin(), noise.end());
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops));
  ch.set_family(SuccessiveSpec{d, x});
  return ch;
}

KrausChannel build_contraction(const ContractionSpec& spec) {
  if (spec.d < 2) throw DimensionMismatch("contraction family needs d >= 2");
  if (spec.weights.size() != spec.contractions.size()) {
    throw LengthMismatch("one contraction per weight required");
  }
  require_unit_weightsum_below_one(spec.weights);
  double a = 0.0;
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < spec.weights.size(); ++k) {
    const ComplexMatrix& v = spec.contractions[k];
    if (!v.square() || v.rows() != spec.d) throw DimensionMismatch("contraction dimension mismatch");
    HermitianEigen gram = hermitian_eigen(v.dagger() * v, 1e-8);
    if (gram.eigenvalues.front() > 1.0 + 1e-10) {
      throw OutOfRange("contraction has operator norm above one");
    }
    ComplexMatrix op = v;
    op *= std::sqrt(spec.weights[k]);
    ops.push_back(op);
    a += spec.weights[k];
  }
  auto noise = noise_kraus(spec.d, (1.0 - a) / static_cast<double>(spec.d));
  ops.insert(ops.end(), noise.begin(), noise.end());
  KrausChannel ch = KrausChannel::from_kraus(std::move(ops), /*require_tp=*/false);
  ch.set_family(spec);
  return ch;
}

KrausChannel build_channel(const FamilySpec& spec) {
  return std::visit(
      [](const auto& s) -> KrausChannel {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DepolarizingSpec>) return build_depolarizing(s.d, s.a);
        if constexpr (std::is_same_v<T, GeneralizedSpec>) return build_generalized(s);
        if constexpr (std::is_same_v<T, WeylSpec>) return build_weyl_channel(s);
        if constexpr (std::is_same_v<T, DiagonalSpec>) return build_diagonal(s);
        if constexpr (std::is_same_v<T, QutritSpec>) return build_qutrit(s.theta, s.a);
        if constexpr (std::is_same_v<T, DoublyDepolarizingSpec>)
          return build_doubly_depolarizing(s.d, s.m, s.a, s.b);
        if constexpr (std::is_same_v<T, SuccessiveSpec>) return build_successive(s.d, s.x);
        if constexpr (std::is_same_v<T, ContractionSpec>) return build_contraction(s);
      },
      spec);
}

KrausChannel tensor(const KrausChannel& lhs, const KrausChannel& rhs) {
  if (lhs.dim_ == 0 || rhs.dim_ == 0) throw DimensionMismatch("tensor of empty channel");
  KrausChannel ch;
  ch.dim_ = lhs.dim_ * rhs.dim_;
  ch.kraus_.reserve(lhs.kraus_.size() * rhs.kraus_.size());
  for (const ComplexMatrix& a : lhs.kraus_)
    for (const ComplexMatrix& b : rhs.kraus_) ch.kraus_.push_back(kron(a, b));
  ch.trace_preserving_ = lhs.trace_preserving_ && rhs.trace_preserving_;
  ch.unital_ = lhs.unital_ && rhs.unital_;
  const ComplexMatrix id_l = ComplexMatrix::identity(lhs.dim_);
  const ComplexMatrix id_r = ComplexMatrix::identity(rhs.dim_);
  ch.stage1_.reserve(lhs.kraus_.size());
  for (const ComplexMatrix& a : lhs.kraus_) ch.stage1_.push_back(kron(a, id_r));
  ch.stage2_.reserve(rhs.kraus_.size());
  for (const ComplexMatrix& b : rhs.kraus_) ch.stage2_.push_back(kron(id_l, b));
  return ch;
}

ComplexMatrix choi_matrix(const KrausChannel& phi) {
  const std::size_t d = phi.dim();
  ComplexMatrix c(d * d, d * d);
  const double invd = 1.0 / static_cast<double>(d);
  for (const ComplexMatrix& k : phi.kraus_ops()) {
    // Block (i,j) accumulates (1/d) (column i of K)(column j of K)^dagger.
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t s = 0; s < d; ++s)
            c(i * d + r, j * d + s) += invd * k(r, i) * std::conj(k(s, j));
  }
  return c;
}

double check_covariance(const KrausChannel& phi, const std::vector<ComplexMatrix>& group_in,
                        const std::vector<ComplexMatrix>& group_out) {
  if (group_in.size() != group_out.size() || group_in.empty()) {
    throw LengthMismatch("covariance check needs matching non-empty group lists");
  }
  const std::size_t d = phi.dim();
  for (const ComplexMatrix& u : group_in) {
    if (!u.square() || u.rows() != d) throw DimensionMismatch("input group dimension mismatch");
    require_unitary(u, 1e-8);
  }
  for (const ComplexMatrix& u : group_out) {
    if (!u.square() || u.rows() != d) throw DimensionMismatch("output group dimension mismatch");
    require_unitary(u, 1e-8);
  }

  // Fixed pseudorandom full-rank states keep this check deterministic.
  RngStream rng(0x9e3779b97f4a7c15ULL);
  std::vector<ComplexMatrix> states;
  for (int s = 0; s < 10; ++s) {
    ComplexMatrix g(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.complex_in_square();
    ComplexMatrix rho = g * g.dagger();
    rho *= 1.0 / rho.trace().real();
    states.push_back(rho);
  }

  double worst = 0.0;
  for (const ComplexMatrix& rho : states) {
    const ComplexMatrix out = phi.apply(rho);
    for (std::size_t g = 0; g < group_in.size(); ++g) {
      ComplexMatrix lhs = phi.apply(group_in[g] * rho * group_in[g].dagger());
      ComplexMatrix rhs = group_out[g] * out * group_out[g].dagger();
      lhs -= rhs;
      worst = std::max(worst, lhs.frobenius_norm());
    }
  }
  return worst;
}

namespace {

// Basis columns i..j (inclusive) of `vecs` copied into a d x r block.
ComplexMatrix columns_block(const ComplexMatrix& vecs, const std::vector<std::size_t>& idx) {
  ComplexMatrix out(vecs.rows(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c)
    for (std::size_t r = 0; r < vecs.rows(); ++r) out(r, c) = vecs(r, idx[c]);
  return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& v) {
  ComplexMatrix h(v.rows(), v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) h(i, j) = 0.5 * (v(i, j) + std::conj(v(j, i)));
  return h;
}

ComplexMatrix antihermitian_part_over_i(const ComplexMatrix& v) {
  ComplexMatrix h(v.rows(), v.cols());
  const cplx half_over_i(0.0, -0.5);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) h(i, j) = half_over_i * (v(i, j) - std::conj(v(j, i)));
  return h;
}

std::vector<std::vector<std::size_t>> group_close(const std::vector<double>& sorted_desc,
                                                  double gap) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < sorted_desc.size(); ++i) {
    if (groups.empty() || sorted_desc[i - 1] - sorted_desc[i] > gap) groups.push_back({});
    groups.back().push_back(i);
  }
  return groups;
}

// Splits a space on which `v` acts invariantly into subspaces where it acts
// as a single phase, using the commuting Hermitian pair (Re v, Im v).
std::vector<ComplexMatrix> phase_eigenspaces(const ComplexMatrix& v, double gap) {
  HermitianEigen re = hermitian_eigen(hermitian_part(v), 1e-7);
  std::vector<ComplexMatrix> out;
  for (const auto& grp : group_close(re.eigenvalues, gap)) {
    ComplexMatrix b = columns_block(re.eigenvectors, grp);
    ComplexMatrix k = b.dagger() * antihermitian_part_over_i(v) * b;
    HermitianEigen im = hermitian_eigen(hermitian_part(k), 1e-7);
    std::vector<double> vals = im.eigenvalues;
    for (const auto& sub : group_close(vals, gap)) {
      out.push_back(b * columns_block(im.eigenvectors, sub));
    }
  }
  return out;
}

// Largest subspace of span(basis) left invariant by v, found by repeatedly
// intersecting with its own image (projector sum spectra near 2).
ComplexMatrix largest_invariant_subspace(const ComplexMatrix& v, ComplexMatrix basis) {
  while (basis.cols() > 0) {
    ComplexMatrix p = basis * basis.dagger();
    ComplexMatrix q = v * p * v.dagger();
    HermitianEigen eig = hermitian_eigen(hermitian_part(p + q), 1e-7);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i) {
      if (eig.eigenvalues[i] >= 2.0 - 1e-7) keep.push_back(i);
    }
    if (keep.size() == basis.cols()) return basis;
    basis = columns_block(eig.eigenvectors, keep);
  }
  return basis;
}

}  // namespace

std::vector<ComplexMatrix> common_eigenvectors(const std::vector<ComplexMatrix>& unitaries,
                                               double tol) {
  if (unitaries.empty()) throw LengthMismatch("common eigenvectors need at least one unitary");
  const std::size_t d = unitaries.front().rows();
  for (const ComplexMatrix& v : unitaries) {
    if (!v.square() || v.rows() != d) throw DimensionMismatch("unitary dimension mismatch");
    require_unitary(v, std::max(tol, 1e-10));
  }
  const double gap = std::max(10.0 * tol, 1e-7);

  std::vector<ComplexMatrix> subspaces{ComplexMatrix::identity(d)};
  for (const ComplexMatrix& v : unitaries) {
    std::vector<ComplexMatrix> next;
    for (const ComplexMatrix& basis : subspaces) {
      ComplexMatrix t = largest_invariant_subspace(v, basis);
      if (t.cols() == 0) continue;
      ComplexMatrix w = t.dagger() * v * t;
      for (const ComplexMatrix& e : phase_eigenspaces(w, gap)) next.push_back(t * e);
    }
    subspaces = std::move(next);
    if (subspaces.empty()) break;
  }

  std::vector<ComplexMatrix> out;
  for (const ComplexMatrix& basis : subspaces) {
    for (std::size_t c = 0; c < basis.cols(); ++c) {
      ComplexMatrix ket(d, 1);
      for (std::size_t r = 0; r < d; ++r) ket(r, 0) = basis(r, c);
      bool ok = true;
      for (const ComplexMatrix& v : unitaries) {
        ComplexMatrix image = v * ket;
        const cplx mu = inner(ket, image);
        image -= mu * ket;
        if (ket_norm(image) > 10.0 * tol) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(ket);
    }
  }
  return out;
}

std::array<double, 3> qubit_lambdas(const std::array<double, 4>& alphas) {
  double sum = 0.0;
  for (double a : alphas) {
    if (a < -1e-12) throw WeightsInvalid("qubit mixture weights must be non-negative");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw WeightsInvalid("qubit mixture weights must sum to one");
  return {2.0 * (alphas[0] + alphas[1]) - 1.0, 2.0 * (alphas[0] + alphas[2]) - 1.0,
          2.0 * (alphas[0] + alphas[3]) - 1.0};
}

}  // namespace qchan
