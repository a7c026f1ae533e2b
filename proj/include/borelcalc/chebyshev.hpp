#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/eigen.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/funcexpr.hpp"

namespace borelcalc {

struct ChebResult {
  ComplexMatrix value;   // p_k(A) by Clenshaw recurrence
  double grid_error = 0; // max |p_k - f| on a 1000-point grid over [a, b]
  double a = 0, b = 0;   // enclosing interval actually used
  unsigned degree = 0;
};

namespace detail {

// Chebyshev interpolation coefficients of f on [a, b] at the degree-k
// Chebyshev points of the first kind; c[0] enters evaluation halved.
inline std::vector<cplx> cheb_coeffs(const std::function<cplx(double)>& f,
                                     double a, double b, unsigned degree) {
  const std::size_t m = degree + 1;
  std::vector<cplx> samples(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double theta =
        M_PI * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    const double x = std::cos(theta);
    samples[j] = f(0.5 * (b - a) * x + 0.5 * (a + b));
  }
  std::vector<cplx> coeffs(m);
  for (std::size_t k = 0; k < m; ++k) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double theta =
          M_PI * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
      s += samples[j] * std::cos(static_cast<double>(k) * theta);
    }
    coeffs[k] = 2.0 * s / static_cast<double>(m);
  }
  return coeffs;
}

inline cplx cheb_eval(const std::vector<cplx>& c, double a, double b,
                      double x) {
  const double t = (2.0 * x - (a + b)) / (b - a);
  cplx b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const cplx next = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = next;
  }
  return t * b1 - b2 + 0.5 * c[0];
}

}  // namespace detail

/// Chebyshev-interpolant route to f(A) for Hermitian A and continuous f:
/// p_k interpolates f on an interval enclosing the spectrum, and p_k(A) is
/// assembled by the matrix Clenshaw recurrence. The spectral mapping bound
/// ||p(A)|| <= sup |p| on [a,b] caps the matrix-level error by the scalar
/// interpolation error, estimated on a 1000-point grid. A nonnegative
/// `target` turns an excessive grid error into DegreeTooSmall.
inline ChebResult cheb_apply(const ComplexMatrix& a_mat,
                             const std::function<cplx(double)>& f,
                             unsigned degree, double target = -1.0,
                             double tol = kDefaultTol) {
  const double herm_gap = (a_mat - a_mat.adjoint()).frobenius_norm();
  if (herm_gap > tol * std::max(1.0, a_mat.frobenius_norm()))
    throw NotHermitian("cheb_apply: A is not Hermitian");

  EigResult eig = hermitian_eigendecompose(a_mat);
  double lam_min = 1e300, lam_max = -1e300;
  for (const cplx& v : eig.eigenvalues) {
    lam_min = std::min(lam_min, v.real());
    lam_max = std::max(lam_max, v.real());
  }
  const double span = std::max(std::abs(lam_min), std::abs(lam_max));
  const double delta = 1e-6 * std::max(1.0, span);
  ChebResult out;
  out.a = lam_min - delta;
  out.b = lam_max + delta;
  out.degree = degree;

  const std::vector<cplx> coeffs = detail::cheb_coeffs(f, out.a, out.b, degree);

  for (int g = 0; g < 1000; ++g) {
    const double x = out.a + (out.b - out.a) * static_cast<double>(g) / 999.0;
    out.grid_error =
        std::max(out.grid_error,
                 std::abs(detail::cheb_eval(coeffs, out.a, out.b, x) - f(x)));
  }
  if (target >= 0.0 && out.grid_error > target)
    throw DegreeTooSmall("cheb_apply: grid error " +
                         std::to_string(out.grid_error) +
                         " exceeds requested target " + std::to_string(target));

  // matrix Clenshaw on the affinely rescaled argument
  const std::size_t n = a_mat.dim();
  const ComplexMatrix id = ComplexMatrix::identity(n);
  const cplx alpha = 2.0 / (out.b - out.a);
  ComplexMatrix t_mat = alpha * a_mat - (alpha * 0.5 * (out.a + out.b)) * id;
  ComplexMatrix b1 = ComplexMatrix::zero(n), b2 = ComplexMatrix::zero(n);
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    ComplexMatrix next = 2.0 * (t_mat * b1) - b2 + coeffs[k] * id;
    b2 = std::move(b1);
    b1 = std::move(next);
  }
  out.value = t_mat * b1 - b2 + (0.5 * coeffs[0]) * id;
  return out;
}

inline ChebResult cheb_apply(const ComplexMatrix& a_mat, const FuncExpr& f,
                             unsigned degree, double target = -1.0,
                             double tol = kDefaultTol) {
  if (f.arity() != 1) throw ArityError("cheb_apply: function arity must be 1");
  return cheb_apply(
      a_mat, [&f](double x) { return f.eval({cplx(x, 0.0)}); }, degree, target,
      tol);
}

}  // namespace borelcalc
