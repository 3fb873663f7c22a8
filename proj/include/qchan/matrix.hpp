#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qchan {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Small-dimension workhorse for states,
// unitaries, Kraus operators and Choi matrices. Everything is by value.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t d);
  static ComplexMatrix diag(const std::vector<double>& values);
  static ComplexMatrix diag_complex(const std::vector<cplx>& values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const std::vector<cplx>& entries() const { return entries_; }

  ComplexMatrix dagger() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  cplx trace() const;
  double frobenius_norm() const;
  double max_abs() const;

  bool is_finite() const;
  bool is_hermitian(double tol) const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix m) {
    m *= s;
    return m;
  }
  friend ComplexMatrix operator*(ComplexMatrix m, cplx s) {
    m *= s;
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> entries_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product: (A kron B)((i,k),(j,l)) = A(i,j) B(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Transpose the second tensor factor of a matrix on C^{d1} x C^{d2}:
// entry ((i,k),(j,l)) moves to ((i,l),(j,k)).
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t d1, std::size_t d2);

// Block-diagonal composition diag(A, B).
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

// Column vectors (kets) are d x 1 matrices.
ComplexMatrix basis_ket(std::size_t d, std::size_t index);
ComplexMatrix outer(const ComplexMatrix& u, const ComplexMatrix& v);  // u v^dagger
ComplexMatrix projector(const ComplexMatrix& ket);                    // ket ket^dagger
cplx inner(const ComplexMatrix& u, const ComplexMatrix& v);           // u^dagger v
double ket_norm(const ComplexMatrix& ket);

}  // namespace qchan
