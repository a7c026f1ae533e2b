#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/errors.hpp"

namespace borelcalc {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kReconTolRel = 1e-8;
inline constexpr int kMaxSweeps = 40;

struct EigResult {
  std::vector<cplx> eigenvalues;
  ComplexMatrix basis;  // columns are eigenvectors
};

struct JointDiagResult {
  ComplexMatrix basis;
  std::vector<std::vector<cplx>> values;  // values[k][j] = j-th matrix, k-th column
};

namespace detail {

// Principal eigenvector of a 3x3 real symmetric matrix (cyclic Jacobi).
inline std::array<double, 3> principal_axis_3x3(std::array<double, 9> g) {
  std::array<double, 9> v = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  double total = 0.0;
  for (double x : g) total += x * x;
  for (int sweep = 0; sweep < 20; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) off += g[3 * p + q] * g[3 * p + q];
    if (off <= 1e-30 * total) break;
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const double apq = g[3 * p + q];
        if (apq == 0.0) continue;
        const double tau = (g[3 * q + q] - g[3 * p + p]) / (2.0 * apq);
        const double t =
            (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double gkp = g[3 * k + p], gkq = g[3 * k + q];
          g[3 * k + p] = c * gkp - s * gkq;
          g[3 * k + q] = s * gkp + c * gkq;
        }
        for (int k = 0; k < 3; ++k) {
          const double gpk = g[3 * p + k], gqk = g[3 * q + k];
          g[3 * p + k] = c * gpk - s * gqk;
          g[3 * q + k] = s * gpk + c * gqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[3 * k + p], vkq = v[3 * k + q];
          v[3 * k + p] = c * vkp - s * vkq;
          v[3 * k + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (g[3 * k + k] > g[3 * best + best]) best = k;
  return {v[0 + best], v[3 + best], v[6 + best]};
}

inline double offdiag_mass(const std::vector<ComplexMatrix>& mats) {
  double s = 0.0;
  for (const auto& m : mats) {
    const std::size_t n = m.dim();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(m(i, j));
  }
  return std::sqrt(s);
}

// Simultaneous cyclic Jacobi on a family of Hermitian matrices. For each
// pair (p,q) one unitary plane rotation is chosen to minimize the combined
// off-diagonal mass of the whole family; for a single matrix this is the
// classical complex Jacobi rotation annihilating the (p,q) entry.
inline ComplexMatrix joint_hermitian_jacobi(std::vector<ComplexMatrix>& mats,
                                            const std::string& who) {
  const std::size_t n = mats.front().dim();
  ComplexMatrix v = ComplexMatrix::identity(n);
  if (n < 2) return v;

  double scale = 1.0;
  for (const auto& m : mats) scale = std::max(scale, m.frobenius_norm());
  const double stop = 1e-14 * scale * static_cast<double>(n);
  const double skip2 = 1e-32 * scale * scale;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_mass(mats) <= stop) return v;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double pair_mass = 0.0;
        for (const auto& m : mats) pair_mass += std::norm(m(p, q));
        if (pair_mass <= skip2) continue;

        // g = (a_pp - a_qq, 2 Re a_pq, -2 Im a_pq); the rotation angles
        // maximize sum_j (v . g_j)^2, i.e. the post-rotation diagonal split.
        std::array<double, 9> big{};
        for (const auto& m : mats) {
          const double g0 = m(p, p).real() - m(q, q).real();
          const double g1 = 2.0 * m(p, q).real();
          const double g2 = -2.0 * m(p, q).imag();
          const double g[3] = {g0, g1, g2};
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) big[3 * a + b] += g[a] * g[b];
        }
        std::array<double, 3> axis = principal_axis_3x3(big);
        if (axis[0] < 0.0)
          for (double& x : axis) x = -x;
        const double c = std::sqrt((1.0 + axis[0]) / 2.0);
        const cplx s(axis[1] / (2.0 * c), axis[2] / (2.0 * c));
        if (std::abs(s) < 1e-18) continue;

        for (auto& m : mats) {
          for (std::size_t k = 0; k < n; ++k) {
            const cplx mkp = m(k, p), mkq = m(k, q);
            m(k, p) = c * mkp + s * mkq;
            m(k, q) = -std::conj(s) * mkp + c * mkq;
          }
          for (std::size_t k = 0; k < n; ++k) {
            const cplx mpk = m(p, k), mqk = m(q, k);
            m(p, k) = c * mpk + std::conj(s) * mqk;
            m(q, k) = -s * mpk + c * mqk;
          }
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp + s * vkq;
          v(k, q) = -std::conj(s) * vkp + c * vkq;
        }
      }
    }
  }
  if (offdiag_mass(mats) > stop)
    throw NoConvergence(who + ": Jacobi sweeps exhausted (" +
                        std::to_string(kMaxSweeps) + ")");
  return v;
}

inline bool eig_order_before(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

inline void permute_columns(ComplexMatrix& m, const std::vector<std::size_t>& perm) {
  ComplexMatrix out(m.dim());
  for (std::size_t j = 0; j < perm.size(); ++j)
    for (std::size_t i = 0; i < m.dim(); ++i) out(i, j) = m(i, perm[j]);
  m = out;
}

}  // namespace detail

inline ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix antihermitian_part(const ComplexMatrix& a) {
  // (A - A*)/(2i)
  return cplx(0.0, -0.5) * (a - a.adjoint());
}

inline EigResult hermitian_eigendecompose(const ComplexMatrix& a,
                                          double tol = kDefaultTol) {
  const double gap = (a - a.adjoint()).frobenius_norm();
  if (gap > tol * std::max(1.0, a.frobenius_norm()))
    throw NotHermitian("hermitian_eigendecompose: ||A - A*|| = " +
                       std::to_string(gap));
  std::vector<ComplexMatrix> work = {hermitian_part(a)};
  ComplexMatrix basis =
      detail::joint_hermitian_jacobi(work, "hermitian_eigendecompose");
  const std::size_t n = a.dim();
  std::vector<cplx> eigs(n);
  for (std::size_t k = 0; k < n; ++k) eigs[k] = cplx(work[0](k, k).real(), 0.0);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) {
    return detail::eig_order_before(eigs[i], eigs[j]);
  });
  std::vector<cplx> sorted(n);
  for (std::size_t k = 0; k < n; ++k) sorted[k] = eigs[perm[k]];
  detail::permute_columns(basis, perm);
  return {std::move(sorted), std::move(basis)};
}

inline EigResult normal_eigendecompose(const ComplexMatrix& a,
                                       double tol = kDefaultTol) {
  const ComplexMatrix astar = a.adjoint();
  const double gap = (astar * a - a * astar).frobenius_norm();
  const double nf = a.frobenius_norm();
  if (gap > tol * std::max(1.0, nf * nf))
    throw NotNormal("normal_eigendecompose: ||A*A - AA*|| = " +
                    std::to_string(gap));
  std::vector<ComplexMatrix> work = {hermitian_part(a), antihermitian_part(a)};
  ComplexMatrix basis =
      detail::joint_hermitian_jacobi(work, "normal_eigendecompose");
  const std::size_t n = a.dim();
  std::vector<cplx> eigs(n);
  for (std::size_t k = 0; k < n; ++k)
    eigs[k] = cplx(work[0](k, k).real(), work[1](k, k).real());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) {
    return detail::eig_order_before(eigs[i], eigs[j]);
  });
  std::vector<cplx> sorted(n);
  for (std::size_t k = 0; k < n; ++k) sorted[k] = eigs[perm[k]];
  detail::permute_columns(basis, perm);
  return {std::move(sorted), std::move(basis)};
}

/// One unitary basis diagonalizing a family of pairwise commuting normal
/// matrices; values[k] is the tuple of k-th diagonal entries.
inline JointDiagResult joint_diagonalize(const std::vector<ComplexMatrix>& as,
                                         double tol = kDefaultTol) {
  if (as.empty()) throw DimensionMismatch("joint_diagonalize: empty family");
  const std::size_t n = as.front().dim();
  for (const auto& m : as)
    if (m.dim() != n)
      throw DimensionMismatch("joint_diagonalize: mixed dimensions");
  for (std::size_t j = 0; j < as.size(); ++j) {
    const ComplexMatrix astar = as[j].adjoint();
    const double gap = (astar * as[j] - as[j] * astar).frobenius_norm();
    const double nf = as[j].frobenius_norm();
    if (gap > tol * std::max(1.0, nf * nf))
      throw NotNormal("joint_diagonalize: input " + std::to_string(j) +
                      " is not normal");
  }
  for (std::size_t j = 0; j < as.size(); ++j) {
    for (std::size_t k = j + 1; k < as.size(); ++k) {
      const double gap = commutator(as[j], as[k]).frobenius_norm();
      const double sc =
          std::max(1.0, as[j].frobenius_norm() * as[k].frobenius_norm());
      if (gap > tol * sc)
        throw NotCommuting("joint_diagonalize: inputs " + std::to_string(j) +
                           " and " + std::to_string(k) + " do not commute (||[A" +
                           std::to_string(j) + ",A" + std::to_string(k) +
                           "]|| = " + std::to_string(gap) + ")");
    }
  }

  std::vector<ComplexMatrix> work;
  work.reserve(2 * as.size());
  for (const auto& m : as) {
    work.push_back(hermitian_part(m));
    work.push_back(antihermitian_part(m));
  }
  ComplexMatrix basis = detail::joint_hermitian_jacobi(work, "joint_diagonalize");

  std::vector<std::vector<cplx>> values(n, std::vector<cplx>(as.size()));
  for (std::size_t j = 0; j < as.size(); ++j)
    for (std::size_t k = 0; k < n; ++k)
      values[k][j] =
          cplx(work[2 * j](k, k).real(), work[2 * j + 1](k, k).real());

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) {
    for (std::size_t t = 0; t < as.size(); ++t) {
      if (values[i][t].real() != values[j][t].real())
        return values[i][t].real() > values[j][t].real();
      if (values[i][t].imag() != values[j][t].imag())
        return values[i][t].imag() > values[j][t].imag();
    }
    return false;
  });
  std::vector<std::vector<cplx>> sorted(n);
  for (std::size_t k = 0; k < n; ++k) sorted[k] = values[perm[k]];
  detail::permute_columns(basis, perm);
  return {std::move(basis), std::move(sorted)};
}

/// Horner evaluation of sum_j coeffs[j] A^j.
inline ComplexMatrix matrix_poly_eval(const std::vector<cplx>& coeffs,
                                      const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  if (coeffs.empty()) return ComplexMatrix::zero(n);
  ComplexMatrix acc = coeffs.back() * ComplexMatrix::identity(n);
  for (std::size_t j = coeffs.size() - 1; j-- > 0;)
    acc = acc * a + coeffs[j] * ComplexMatrix::identity(n);
  return acc;
}

/// Spectral (2-) norm via the Hermitian eigendecomposition of A*A.
inline double operator_norm(const ComplexMatrix& a) {
  if (a.dim() == 0) return 0.0;
  const ComplexMatrix gram = a.adjoint() * a;
  EigResult eig = hermitian_eigendecompose(gram, 1e-6);
  double top = 0.0;
  for (const cplx& v : eig.eigenvalues) top = std::max(top, v.real());
  return std::sqrt(std::max(0.0, top));
}

}  // namespace borelcalc
