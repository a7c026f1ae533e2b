#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "borelcalc/errors.hpp"

namespace borelcalc {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major. Carrier for every
/// finite-dimensional operator in the library.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }

  static ComplexMatrix diagonal(const std::vector<cplx>& entries) {
    ComplexMatrix m(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
  }

  std::size_t dim() const { return dim_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return a_[i * dim_ + j];
  }

  bool all_finite() const {
    for (const cplx& z : a_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cplx& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

  ComplexMatrix& operator+=(const ComplexMatrix& rhs) {
    require_same_dim(rhs);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& rhs) {
    require_same_dim(rhs);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (cplx& z : a_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    return a += b;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    return a -= b;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
    a.require_same_dim(b);
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  std::vector<cplx> apply(const std::vector<cplx>& x) const {
    if (x.size() != dim_) throw LengthMismatch("matrix/vector size mismatch");
    std::vector<cplx> y(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  void require_same_dim(const ComplexMatrix& other) const {
    if (dim_ != other.dim_)
      throw DimensionMismatch("matrix dimensions differ: " +
                              std::to_string(dim_) + " vs " +
                              std::to_string(other.dim_));
  }

  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

inline double distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

inline ComplexMatrix commutator(const ComplexMatrix& a,
                                const ComplexMatrix& b) {
  return a * b - b * a;
}

inline cplx inner(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  if (x.size() != y.size()) throw LengthMismatch("vector sizes differ");
  cplx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s;
}

inline double vec_norm(const std::vector<cplx>& x) {
  double s = 0.0;
  for (const cplx& z : x) s += std::norm(z);
  return std::sqrt(s);
}

/// Gauss-Jordan inverse with partial pivoting.
inline ComplexMatrix inverse(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix work = a;
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(work(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(work(r, col)) > best) {
        best = std::abs(work(r, col));
        pivot = r;
      }
    }
    if (best == 0.0) throw NotInvertible("matrix is numerically singular");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const cplx d = work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx factor = work(r, col);
      if (factor == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= factor * work(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace borelcalc
