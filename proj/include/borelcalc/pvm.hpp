#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/eigen.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/funcexpr.hpp"
#include "borelcalc/report.hpp"

namespace borelcalc {

inline constexpr double kPvmTol = 1e-9;
inline constexpr double kClusterRel = 1e-8;

using Point = std::vector<cplx>;

struct PvmAtom {
  Point point;
  ComplexMatrix proj;
};

/// Finite projection-valued measure on C^d: finitely many atoms whose
/// orthogonal projections resolve the identity.
struct PVM {
  int d = 1;
  std::size_t dim = 0;
  std::vector<PvmAtom> atoms;

  ComplexMatrix projection_sum() const {
    ComplexMatrix s = ComplexMatrix::zero(dim);
    for (const auto& a : atoms) s += a.proj;
    return s;
  }
};

namespace detail {

inline bool point_before(const Point& a, const Point& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].real() != b[k].real()) return a[k].real() > b[k].real();
    if (a[k].imag() != b[k].imag()) return a[k].imag() > b[k].imag();
  }
  return false;
}

inline void sort_atoms(std::vector<PvmAtom>& atoms) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const PvmAtom& x, const PvmAtom& y) {
                     return point_before(x.point, y.point);
                   });
}

// P <- (P + P*)/2 followed by one Newton step P <- 3P^2 - 2P^3.
inline ComplexMatrix polish_projection(const ComplexMatrix& p) {
  ComplexMatrix h = 0.5 * (p + p.adjoint());
  ComplexMatrix h2 = h * h;
  return 3.0 * h2 - 2.0 * (h2 * h);
}

}  // namespace detail

/// Clustered spectral measure from precomputed eigendata: eigenvalues within
/// cluster_delta of each other (single linkage, order independent) become
/// one atom, its point the cluster mean, its projection the polished sum of
/// |v><v| over the cluster's basis columns.
inline PVM pvm_from_eigendata(const std::vector<cplx>& eigenvalues,
                              const ComplexMatrix& basis,
                              double cluster_delta) {
  const std::size_t n = basis.dim();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(eigenvalues[i] - eigenvalues[j]) <= cluster_delta)
        parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> root_of(n, static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = find(k);
    if (root_of[r] == static_cast<std::size_t>(-1)) {
      root_of[r] = clusters.size();
      clusters.emplace_back();
    }
    clusters[root_of[r]].push_back(k);
  }

  for (const auto& members : clusters) {
    double diam = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        diam = std::max(diam, std::abs(eigenvalues[members[i]] -
                                       eigenvalues[members[j]]));
    if (diam > 3.0 * cluster_delta)
      throw ClusterAmbiguity(
          "eigenvalue cluster of diameter " + std::to_string(diam) +
          " exceeds 3*cluster_delta = " + std::to_string(3.0 * cluster_delta));
  }

  PVM out;
  out.d = 1;
  out.dim = n;
  for (const auto& members : clusters) {
    cplx rep = 0.0;
    ComplexMatrix p = ComplexMatrix::zero(n);
    for (std::size_t k : members) {
      rep += eigenvalues[k];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          p(i, j) += basis(i, k) * std::conj(basis(j, k));
    }
    rep /= static_cast<double>(members.size());
    out.atoms.push_back({{rep}, detail::polish_projection(p)});
  }
  detail::sort_atoms(out.atoms);
  return out;
}

/// Spectral measure of a normal matrix.
inline PVM pvm_from_normal(const ComplexMatrix& a, double cluster_delta = -1.0) {
  if (cluster_delta < 0.0)
    cluster_delta = kClusterRel * std::max(1.0, a.frobenius_norm());
  EigResult eig = normal_eigendecompose(a);
  return pvm_from_eigendata(eig.eigenvalues, eig.basis, cluster_delta);
}

inline ComplexMatrix measure_of(const PVM& e, const BorelSetExpr& b) {
  if (b.arity() != e.d)
    throw ArityError("measure_of: set arity " + std::to_string(b.arity()) +
                     " vs PVM arity " + std::to_string(e.d));
  ComplexMatrix m = ComplexMatrix::zero(e.dim);
  for (const auto& a : e.atoms)
    if (b.member(a.point)) m += a.proj;
  return m;
}

/// PVM1-PVM3 with measured residuals. PVM3 is exercised on finite disjoint
/// unions of atom-separating sets; finite additivity exhausts countable
/// additivity for a finite measure.
inline CheckReport verify_pvm_axioms(const PVM& e, double tol = kPvmTol) {
  CheckReport report;

  double idem = 0.0, selfadj = 0.0;
  for (const auto& a : e.atoms) {
    idem = std::max(idem, (a.proj * a.proj - a.proj).frobenius_norm());
    selfadj = std::max(selfadj, (a.proj.adjoint() - a.proj).frobenius_norm());
  }
  report.add("PVM1 idempotent", idem, tol);
  report.add("PVM1 self-adjoint", selfadj, tol);

  double ortho = 0.0;
  for (std::size_t i = 0; i < e.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < e.atoms.size(); ++j)
      ortho = std::max(ortho,
                       (e.atoms[i].proj * e.atoms[j].proj).frobenius_norm());
  report.add("PVM1 mutually orthogonal", ortho, tol);

  const double resolution =
      (e.projection_sum() - ComplexMatrix::identity(e.dim)).frobenius_norm();
  report.add("PVM2 resolution of identity", resolution, tol);

  // Atom-separating disjoint pieces: a union of singletons and its
  // complement partition X, so E(left) + E(right) must resolve E(X) = I.
  // For a finite PVM, finite additivity exhausts the countable axiom.
  double additivity = resolution;
  for (std::size_t split = 1; split <= e.atoms.size(); ++split) {
    std::vector<BorelSetExpr> singles;
    for (std::size_t k = 0; k < split; ++k)
      singles.push_back(BorelSetExpr::singleton(e.atoms[k].point));
    const BorelSetExpr left_set = BorelSetExpr::set_union(std::move(singles));
    const ComplexMatrix left = measure_of(e, left_set);
    const ComplexMatrix right =
        measure_of(e, BorelSetExpr::complement(left_set));
    additivity = std::max(
        additivity, (left + right - ComplexMatrix::identity(e.dim))
                        .frobenius_norm());
  }
  report.add("PVM3 finite additivity", additivity, tol);

  bool distinct = true;
  for (std::size_t i = 0; i < e.atoms.size() && distinct; ++i)
    for (std::size_t j = i + 1; j < e.atoms.size(); ++j)
      if (e.atoms[i].point == e.atoms[j].point) {
        distinct = false;
        break;
      }
  double zero_atom = e.atoms.empty() ? 1.0 : 0.0;
  for (const auto& a : e.atoms)
    if (a.proj.frobenius_norm() < 0.5) zero_atom = 1.0;
  report.add("atoms distinct and nonzero", (distinct ? 0.0 : 1.0) + zero_atom,
             0.5);
  return report;
}

inline bool is_null_set(const PVM& e, const BorelSetExpr& b) {
  if (b.arity() != e.d)
    throw ArityError("is_null_set: set arity " + std::to_string(b.arity()) +
                     " vs PVM arity " + std::to_string(e.d));
  for (const auto& a : e.atoms)
    if (b.member(a.point)) return false;
  return true;
}

inline std::vector<Point> support_of(const PVM& e) {
  std::vector<Point> pts;
  pts.reserve(e.atoms.size());
  for (const auto& a : e.atoms) pts.push_back(a.point);
  return pts;
}

/// Image measure under the map phi = (phi_1, ..., phi_m); colliding image
/// points merge by summing projections.
inline PVM pvm_pushforward(const PVM& e, std::span<const FuncExpr> phi) {
  if (phi.empty()) throw ArityError("pvm_pushforward: empty map tuple");
  for (const auto& f : phi)
    if (f.arity() != e.d)
      throw ArityError("pvm_pushforward: map arity " +
                       std::to_string(f.arity()) + " vs PVM arity " +
                       std::to_string(e.d));
  PVM out;
  out.d = static_cast<int>(phi.size());
  out.dim = e.dim;
  for (const auto& a : e.atoms) {
    Point image(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) image[k] = phi[k].eval(a.point);
    bool merged = false;
    for (auto& existing : out.atoms) {
      if (existing.point == image) {
        existing.proj += a.proj;
        merged = true;
        break;
      }
    }
    if (!merged) out.atoms.push_back({std::move(image), a.proj});
  }
  detail::sort_atoms(out.atoms);
  return out;
}

inline PVM pvm_pushforward(const PVM& e, const FuncExpr& phi) {
  return pvm_pushforward(e, std::span<const FuncExpr>(&phi, 1));
}

/// Product of PVMs sharing one eigenbasis (e.g. the per-coordinate measures
/// of one joint_diagonalize call). Atom projections across factors must
/// commute; the product projection is their composition.
inline PVM pvm_product(const std::vector<PVM>& es, double tol = kPvmTol) {
  if (es.empty()) throw ArityError("pvm_product: no factors");
  const std::size_t dim = es.front().dim;
  for (const auto& e : es) {
    if (e.dim != dim) throw DimensionMismatch("pvm_product: mixed dimensions");
    if (e.d != 1)
      throw ArityError("pvm_product: factors must be PVMs on C (d = 1)");
  }
  for (std::size_t x = 0; x < es.size(); ++x)
    for (std::size_t y = x + 1; y < es.size(); ++y)
      for (const auto& ax : es[x].atoms)
        for (const auto& ay : es[y].atoms) {
          const double gap = commutator(ax.proj, ay.proj).frobenius_norm();
          if (gap > 100.0 * tol)
            throw NotCommuting(
                "pvm_product: projections of factors " + std::to_string(x) +
                " and " + std::to_string(y) + " do not commute (residual " +
                std::to_string(gap) + ")");
        }

  PVM out;
  out.d = static_cast<int>(es.size());
  out.dim = dim;
  std::vector<PvmAtom> acc = {{Point{}, ComplexMatrix::identity(dim)}};
  for (const auto& e : es) {
    std::vector<PvmAtom> next;
    for (const auto& partial : acc) {
      for (const auto& a : e.atoms) {
        ComplexMatrix p = partial.proj * a.proj;
        if (p.frobenius_norm() < 0.5) continue;  // empty joint eigenspace
        Point pt = partial.point;
        pt.push_back(a.point[0]);
        next.push_back({std::move(pt), detail::polish_projection(p)});
      }
    }
    acc = std::move(next);
  }
  out.atoms = std::move(acc);
  detail::sort_atoms(out.atoms);
  return out;
}

}  // namespace borelcalc
