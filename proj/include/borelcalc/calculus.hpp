#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/eigen.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/expr_sampler.hpp"
#include "borelcalc/funcexpr.hpp"
#include "borelcalc/pvm.hpp"
#include "borelcalc/report.hpp"

namespace borelcalc {

inline constexpr double kMfcTol = 1e-8;
inline constexpr double kAgreeTol = 1e-8;
inline constexpr std::uint64_t kAgreeAuditSeed = 0x5eed0c0ffee;

/// PVM-backed realization of a Borel functional calculus on a
/// finite-dimensional space. All operators Phi(f) are bounded here, so the
/// bounded elements exhaust the measurable functions.
struct BorelCalculus {
  PVM measure;

  int arity() const { return measure.d; }
  std::size_t dim() const { return measure.dim; }
};

/// Phi(f) = sum_i f(lambda_i) P_i (exact for a finite PVM).
inline ComplexMatrix apply_fn(const BorelCalculus& c, const FuncExpr& f) {
  if (f.arity() != c.arity())
    throw ArityError("apply_fn: function arity " + std::to_string(f.arity()) +
                     " vs calculus arity " + std::to_string(c.arity()));
  ComplexMatrix out = ComplexMatrix::zero(c.dim());
  for (const auto& a : c.measure.atoms) out += f.eval(a.point) * a.proj;
  return out;
}

inline BorelCalculus calculus_from_normal(const ComplexMatrix& a,
                                          double cluster_delta = -1.0) {
  return {pvm_from_normal(a, cluster_delta)};
}

/// A finite stand-in for a bp-convergent sequence: terms converging
/// pointwise on the atom points to `limit`, uniformly bounded by `bound`.
struct BpSequence {
  std::vector<FuncExpr> terms;
  FuncExpr limit;
  double bound = 1.0;
};

using ApplyMap = std::function<ComplexMatrix(const FuncExpr&)>;

/// MFC1-MFC5 residuals for an arbitrary operator-valued map on expressions.
/// `points` are the spectral sample points (sup norms of functions are taken
/// there). The MFC5 rows certify only the supplied sequences; no finite test
/// can quantify over all bp-convergent sequences.
inline CheckReport verify_mfc_axioms_map(const ApplyMap& apply, int arity,
                                         std::size_t dim,
                                         const std::vector<Point>& points,
                                         const std::vector<FuncExpr>& fs,
                                         const std::vector<BpSequence>& seqs,
                                         double tol = kMfcTol) {
  CheckReport report;
  const ComplexMatrix id = ComplexMatrix::identity(dim);

  const ComplexMatrix one = apply(FuncExpr::constant(1.0, arity));
  report.add("MFC1 unit", (one - id).frobenius_norm(), tol);

  auto sup_on_points = [&](const FuncExpr& f) {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, std::abs(f.eval(p)));
    return m;
  };

  double add_res = 0.0, scal_res = 0.0, mul_res = 0.0;
  std::vector<ComplexMatrix> images;
  images.reserve(fs.size());
  for (const auto& f : fs) images.push_back(apply(f));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const ComplexMatrix sum = apply(FuncExpr::add(fs[i], fs[j]));
      const ComplexMatrix prod = apply(FuncExpr::mul(fs[i], fs[j]));
      const double sc =
          std::max(1.0, images[i].frobenius_norm() * images[j].frobenius_norm());
      add_res = std::max(
          add_res, (images[i] + images[j] - sum).frobenius_norm() / sc);
      mul_res = std::max(
          mul_res, (images[i] * images[j] - prod).frobenius_norm() / sc);
    }
    const cplx lambda(0.5, -2.0);
    const ComplexMatrix scaled = apply(FuncExpr::scalar(lambda, fs[i]));
    scal_res = std::max(scal_res,
                        (lambda * images[i] - scaled).frobenius_norm() /
                            std::max(1.0, images[i].frobenius_norm()));
  }
  report.add("MFC2 additivity", add_res, tol);
  report.add("MFC2 homogeneity", scal_res, tol);
  report.add("MFC3 multiplicativity", mul_res, tol);

  double adj_res = 0.0, norm_res = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const ComplexMatrix conj_img = apply(FuncExpr::conj(fs[i]));
    adj_res = std::max(adj_res,
                       (images[i].adjoint() - conj_img).frobenius_norm() /
                           std::max(1.0, images[i].frobenius_norm()));
    const double sup = sup_on_points(fs[i]);
    norm_res = std::max(norm_res, (operator_norm(images[i]) - sup) /
                                      std::max(1.0, sup));
  }
  report.add("MFC4 adjoint", adj_res, tol);
  report.add("MFC4 norm bound", norm_res, tol);

  for (std::size_t s = 0; s < seqs.size(); ++s) {
    const BpSequence& seq = seqs[s];
    double bound_excess = 0.0;
    for (const auto& t : seq.terms)
      for (const auto& p : points)
        bound_excess = std::max(bound_excess, std::abs(t.eval(p)) - seq.bound);
    report.add("MFC5 seq " + std::to_string(s) + " bound", bound_excess, tol,
               "declared bound " + std::to_string(seq.bound));

    const ComplexMatrix limit_img = apply(seq.limit);
    std::string trail;
    double last = 0.0;
    for (const auto& t : seq.terms) {
      last = (apply(t) - limit_img).frobenius_norm() /
             std::max(1.0, limit_img.frobenius_norm());
      trail += (trail.empty() ? "" : " ") + std::to_string(last);
    }
    report.add("MFC5 seq " + std::to_string(s) + " limit", last, tol,
               "residual trail: " + trail);
  }
  return report;
}

inline CheckReport verify_mfc_axioms(const BorelCalculus& c,
                                     const std::vector<FuncExpr>& fs,
                                     const std::vector<BpSequence>& seqs,
                                     double tol = kMfcTol) {
  return verify_mfc_axioms_map(
      [&](const FuncExpr& f) { return apply_fn(c, f); }, c.arity(), c.dim(),
      support_of(c.measure), fs, seqs, tol);
}

/// Part of the calculus in ran(P) for a projection P commuting with every
/// spectral projection. Atoms are compressed onto an orthonormal basis of
/// ran(P); atoms compressing to zero are dropped.
inline BorelCalculus restrict_to_subspace(const BorelCalculus& c,
                                          const ComplexMatrix& p,
                                          double tol = kPvmTol) {
  if (p.dim() != c.dim())
    throw DimensionMismatch("restrict_to_subspace: projection dimension");
  if ((p * p - p).frobenius_norm() > tol * std::max(1.0, p.frobenius_norm()) ||
      (p.adjoint() - p).frobenius_norm() > tol)
    throw Error("restrict_to_subspace: P is not an orthogonal projection");
  for (std::size_t k = 0; k < c.measure.atoms.size(); ++k) {
    const double gap = commutator(p, c.measure.atoms[k].proj).frobenius_norm();
    if (gap > tol)
      throw NotInvariant("restrict_to_subspace: P does not commute with the "
                         "projection of atom " +
                         std::to_string(k) + " (residual " +
                         std::to_string(gap) + ")");
  }

  // orthonormal basis of ran(P) = eigenvectors with eigenvalue near 1
  EigResult eig = hermitian_eigendecompose(p, 1e-6);
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < p.dim(); ++k)
    if (eig.eigenvalues[k].real() > 0.5) cols.push_back(k);
  const std::size_t r = cols.size();

  PVM out;
  out.d = c.arity();
  out.dim = r;
  for (const auto& a : c.measure.atoms) {
    ComplexMatrix comp(r);
    for (std::size_t x = 0; x < r; ++x)
      for (std::size_t y = 0; y < r; ++y) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < p.dim(); ++i)
          for (std::size_t j = 0; j < p.dim(); ++j)
            s += std::conj(eig.basis(i, cols[x])) * a.proj(i, j) *
                 eig.basis(j, cols[y]);
        comp(x, y) = s;
      }
    if (comp.frobenius_norm() < 0.5) continue;
    out.atoms.push_back({a.point, detail::polish_projection(comp)});
  }
  detail::sort_atoms(out.atoms);
  return {std::move(out)};
}

/// Phi^phi(f) := Phi(f o phi), realized on atoms.
inline BorelCalculus pushforward_calculus(const BorelCalculus& c,
                                          std::span<const FuncExpr> phi) {
  return {pvm_pushforward(c.measure, phi)};
}

inline BorelCalculus pushforward_calculus(const BorelCalculus& c,
                                          const FuncExpr& phi) {
  return {pvm_pushforward(c.measure, phi)};}

/// Pull-back along the substitution homomorphism T g := g o psi. At the
/// atom level this relabels (and possibly merges) the spectral points, so it
/// coincides with the push-forward along psi.
inline BorelCalculus pullback_calculus(const BorelCalculus& c,
                                       std::span<const FuncExpr> psi) {
  return {pvm_pushforward(c.measure, psi)};
}

inline BorelCalculus pullback_calculus(const BorelCalculus& c,
                                       const FuncExpr& psi) {
  return {pvm_pushforward(c.measure, psi)};
}

/// Joint calculus of a pairwise commuting normal tuple: Phi on C^d with
/// Phi(z_j) = A_j, built from one shared eigenbasis. The per-coordinate
/// cluster representatives are averages, so after the product each joint
/// atom's coordinates are refined to the Rayleigh values tr(P A_j)/tr(P);
/// on a joint eigenprojection these are the simultaneous eigenvalues.
inline BorelCalculus joint_calculus(const std::vector<ComplexMatrix>& as,
                                    double tol = kDefaultTol) {
  JointDiagResult jd = joint_diagonalize(as, tol);
  const std::size_t n = jd.basis.dim();
  std::vector<PVM> coords;
  for (std::size_t j = 0; j < as.size(); ++j) {
    std::vector<cplx> vals(n);
    for (std::size_t k = 0; k < n; ++k) vals[k] = jd.values[k][j];
    const double delta = kClusterRel * std::max(1.0, as[j].frobenius_norm());
    coords.push_back(pvm_from_eigendata(vals, jd.basis, delta));
  }
  PVM product = pvm_product(coords);
  for (auto& atom : product.atoms) {
    double rank = 0.0;
    for (std::size_t i = 0; i < n; ++i) rank += atom.proj(i, i).real();
    for (std::size_t j = 0; j < as.size(); ++j) {
      const ComplexMatrix pa = atom.proj * as[j];
      cplx tr = 0.0;
      for (std::size_t i = 0; i < n; ++i) tr += pa(i, i);
      atom.point[j] = tr / rank;
    }
  }
  detail::sort_atoms(product.atoms);
  return {std::move(product)};
}

/// Real spectral theorem route: real symmetric input, atoms exactly real,
/// projections real. Rejects inputs that are merely normal.
inline BorelCalculus selfadjoint_real_calculus(const ComplexMatrix& a,
                                               double tol = kDefaultTol) {
  double imag_mass = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      imag_mass += a(i, j).imag() * a(i, j).imag();
  imag_mass = std::sqrt(imag_mass);
  const double scale = std::max(1.0, a.frobenius_norm());
  if (imag_mass > tol * scale)
    throw NotSelfAdjoint("selfadjoint_real_calculus: input is not real");
  double sym_gap = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      sym_gap += std::norm(a(i, j) - a(j, i));
  sym_gap = std::sqrt(sym_gap);
  if (sym_gap > tol * scale)
    throw NotSelfAdjoint(
        "selfadjoint_real_calculus: input is not symmetric (||A - A^T|| = " +
        std::to_string(sym_gap) + ")");
  EigResult eig = hermitian_eigendecompose(a, tol);
  const double delta = kClusterRel * scale;
  return {pvm_from_eigendata(eig.eigenvalues, eig.basis, delta)};
}

struct AgreeResult {
  bool agree = false;
  std::uint64_t seed = 0;
  double max_residual = 0.0;
  std::size_t functions_checked = 0;

  explicit operator bool() const { return agree; }
};

/// Executable uniqueness: agreement on the generating functions, then a
/// seeded audit over random (smooth) expressions. Equality of calculi means
/// equality of the maps, not of the atom lists.
inline AgreeResult calculi_agree(const BorelCalculus& a, const BorelCalculus& b,
                                 const std::vector<FuncExpr>& generators,
                                 double tol = kAgreeTol,
                                 std::uint64_t seed = kAgreeAuditSeed,
                                 std::size_t audit_count = 50) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("calculi_agree: dimensions differ");
  if (a.arity() != b.arity())
    throw ArityError("calculi_agree: arities differ");
  AgreeResult res;
  res.seed = seed;
  auto gap = [&](const FuncExpr& f) {
    const ComplexMatrix ia = apply_fn(a, f);
    const ComplexMatrix ib = apply_fn(b, f);
    return (ia - ib).frobenius_norm() / std::max(1.0, ia.frobenius_norm());
  };
  for (const auto& f : generators) {
    res.max_residual = std::max(res.max_residual, gap(f));
    ++res.functions_checked;
  }
  if (res.max_residual > tol) return res;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < audit_count; ++k) {
    FuncExpr f = sample_smooth_expr(rng, a.arity(), 4);
    res.max_residual = std::max(res.max_residual, gap(f));
    ++res.functions_checked;
    if (res.max_residual > tol) return res;
  }
  res.agree = true;
  return res;
}

}  // namespace borelcalc
