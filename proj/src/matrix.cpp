#include "qchan/matrix.hpp"

#include <cmath>
#include <utility>

#include "qchan/errors.hpp"

namespace qchan {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, cplx(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionMismatch("entry count does not match matrix shape");
  }
  if (!is_finite()) {
    throw Error("non-finite matrix entry");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t d) {
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diag(const std::vector<double>& values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::diag_complex(const std::vector<cplx>& values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::dagger() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = std::conj(entries_[i]);
  return out;
}

cplx ComplexMatrix::trace() const {
  if (!square()) throw DimensionMismatch("trace of non-square matrix");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : entries_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : entries_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::is_finite() const {
  for (const cplx& z : entries_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (!square()) return false;
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      s += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
    }
  }
  return std::sqrt(s) <= tol;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix addition shape");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix subtraction shape");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& z : entries_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t d1, std::size_t d2) {
  if (!m.square() || m.rows() != d1 * d2) {
    throw DimensionMismatch("partial transpose needs a square d1*d2 matrix");
  }
  ComplexMatrix out(d1 * d2, d1 * d2);
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t k = 0; k < d2; ++k)
      for (std::size_t j = 0; j < d1; ++j)
        for (std::size_t l = 0; l < d2; ++l)
          out(i * d2 + l, j * d2 + k) = m(i * d2 + k, j * d2 + l);
  return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

ComplexMatrix basis_ket(std::size_t d, std::size_t index) {
  if (index >= d) throw OutOfRange("basis index out of range");
  ComplexMatrix v(d, 1);
  v(index, 0) = 1.0;
  return v;
}

ComplexMatrix outer(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.cols() != 1 || v.cols() != 1) throw DimensionMismatch("outer product needs column vectors");
  ComplexMatrix out(u.rows(), v.rows());
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < v.rows(); ++j) out(i, j) = u(i, 0) * std::conj(v(j, 0));
  return out;
}

ComplexMatrix projector(const ComplexMatrix& ket) { return outer(ket, ket); }

cplx inner(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.cols() != 1 || v.cols() != 1 || u.rows() != v.rows()) {
    throw DimensionMismatch("inner product needs matching column vectors");
  }
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) s += std::conj(u(i, 0)) * v(i, 0);
  return s;
}

double ket_norm(const ComplexMatrix& ket) {
  double s = 0.0;
  for (std::size_t i = 0; i < ket.rows(); ++i) s += std::norm(ket(i, 0));
  return std::sqrt(s);
}

}  // namespace qchan
