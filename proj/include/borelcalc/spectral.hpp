#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "borelcalc/calculus.hpp"
#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/eigen.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/funcexpr.hpp"

namespace borelcalc {

inline constexpr double kZeroWeightCut = 1e-14;

/// { f(lambda_i) } deduplicated: for a finite PVM the essential range of f
/// is exactly the image of the atom set.
inline std::vector<cplx> essential_range(const BorelCalculus& c,
                                         const FuncExpr& f) {
  if (f.arity() != c.arity())
    throw ArityError("essential_range: arity mismatch");
  std::vector<cplx> out;
  for (const auto& a : c.measure.atoms) {
    const cplx v = f.eval(a.point);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](const cplx& x, const cplx& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

struct SpectralReport {
  std::vector<cplx> spectrum;
  std::vector<cplx> point_spectrum;
  std::vector<std::pair<cplx, ComplexMatrix>> eigenprojections;
  double essran_tol = 0.0;

  const ComplexMatrix* projection_at(cplx value, double tol = 1e-9) const {
    for (const auto& [v, p] : eigenprojections)
      if (std::abs(v - value) <= tol) return &p;
    return nullptr;
  }
};

/// Spectrum = approximate point spectrum = essential range; in finite
/// dimension every spectral value is an eigenvalue and the eigenprojection
/// at mu is Phi(1_{f = mu}).
inline SpectralReport spectral_report(const BorelCalculus& c,
                                      const FuncExpr& f) {
  if (f.arity() != c.arity())
    throw ArityError("spectral_report: arity mismatch");
  SpectralReport rep;
  rep.spectrum = essential_range(c, f);
  rep.point_spectrum = rep.spectrum;
  for (const cplx& mu : rep.spectrum) {
    ComplexMatrix p = ComplexMatrix::zero(c.dim());
    for (const auto& a : c.measure.atoms)
      if (f.eval(a.point) == mu) p += a.proj;
    rep.eigenprojections.emplace_back(mu, std::move(p));
  }
  return rep;
}

/// max |f| over the atoms, cross-checked against the 2-norm of Phi(f); the
/// two routes disagreeing beyond tolerance signals a broken calculus.
inline double operator_norm_via_calculus(const BorelCalculus& c,
                                         const FuncExpr& f,
                                         double tol = 1e-8) {
  if (f.arity() != c.arity())
    throw ArityError("operator_norm_via_calculus: arity mismatch");
  double sup = 0.0;
  for (const auto& a : c.measure.atoms)
    sup = std::max(sup, std::abs(f.eval(a.point)));
  const double direct = operator_norm(apply_fn(c, f));
  if (std::abs(direct - sup) > tol * std::max(1.0, sup))
    throw Error("operator_norm_via_calculus: norm routes disagree (" +
                std::to_string(direct) + " vs " + std::to_string(sup) + ")");
  return sup;
}

/// One cyclic block: the span of { P_i x } for a single vector x.
struct CyclicBlock {
  std::vector<cplx> cyclic_vector;      // the generating unit vector
  std::vector<std::size_t> atom_index;  // atoms with nonzero weight
  std::vector<double> weights;          // mu_x({lambda_i}) = ||P_i x||^2
};

struct CyclicDecomposition {
  std::vector<CyclicBlock> blocks;
  ComplexMatrix unitary;              // U: H -> weighted direct sum
  std::vector<Point> model_points;    // per model coordinate: its atom point
  std::size_t dim = 0;
  int arity = 1;

  /// Tf: the multiplier values of f on the model space coordinates.
  std::vector<cplx> multiplier_values(const FuncExpr& f,
                                      const PVM& measure) const {
    std::vector<cplx> out;
    out.reserve(dim);
    for (std::size_t k = 0; k < coord_atom.size(); ++k)
      out.push_back(f.eval(measure.atoms[coord_atom[k]].point));
    return out;
  }

  std::vector<std::size_t> coord_atom;  // model coordinate -> atom index
};

/// Greedy cyclic decomposition: repeatedly take the first standard basis
/// vector with mass outside the previously generated blocks, orthonormalize
/// against them, and span { P_i x }. Finite exhaustion stands in for the
/// maximality argument; atoms with ||P_i x||^2 below kZeroWeightCut are
/// dropped so every constructed weight is strictly positive.
inline CyclicDecomposition multiplication_representation(
    const BorelCalculus& c,
    const std::vector<std::vector<cplx>>& preferred_starts = {}) {
  const std::size_t n = c.dim();
  CyclicDecomposition dec;
  dec.dim = n;
  dec.arity = c.arity();

  std::vector<std::vector<cplx>> onb;  // accumulated model basis vectors of H
  auto project_out = [&](std::vector<cplx> v) {
    for (const auto& u : onb) {
      const cplx coef = inner(u, v);
      for (std::size_t i = 0; i < n; ++i) v[i] -= coef * u[i];
    }
    return v;
  };

  std::size_t preferred_used = 0;
  while (onb.size() < n) {
    // next cyclic vector: preferred starts first, then standard basis
    std::vector<cplx> x;
    while (preferred_used < preferred_starts.size()) {
      std::vector<cplx> cand = project_out(preferred_starts[preferred_used++]);
      if (vec_norm(cand) > 1e-7) {
        x = std::move(cand);
        break;
      }
    }
    if (x.empty()) {
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<cplx> e(n, cplx{});
        e[k] = 1.0;
        std::vector<cplx> cand = project_out(std::move(e));
        if (vec_norm(cand) > 1e-7) {
          x = std::move(cand);
          break;
        }
      }
    }
    if (x.empty())
      throw Error("multiplication_representation: exhausted basis before "
                  "covering the space");
    const double nx = vec_norm(x);
    for (auto& z : x) z /= nx;

    CyclicBlock block;
    block.cyclic_vector = x;
    for (std::size_t i = 0; i < c.measure.atoms.size(); ++i) {
      std::vector<cplx> px = c.measure.atoms[i].proj.apply(x);
      const double w = vec_norm(px);
      if (w * w < kZeroWeightCut) continue;
      for (auto& z : px) z /= w;
      // orthonormalize against everything collected so far (the P_i x are
      // orthogonal within the block; tiny cross terms against earlier
      // blocks are removed for numerical hygiene)
      px = project_out(std::move(px));
      const double resid = vec_norm(px);
      if (resid < 1e-7) continue;
      for (auto& z : px) z /= resid;
      block.atom_index.push_back(i);
      block.weights.push_back(w * w);
      dec.coord_atom.push_back(i);
      onb.push_back(std::move(px));
    }
    if (block.atom_index.empty())
      throw Error("multiplication_representation: degenerate cyclic vector");
    dec.blocks.push_back(std::move(block));
  }

  // U rows are the conjugated model basis vectors: (Ux)_k = <u_k, x>
  dec.unitary = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      dec.unitary(k, i) = std::conj(onb[k][i]);
  dec.model_points.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    dec.model_points.push_back(c.measure.atoms[dec.coord_atom[k]].point);
  return dec;
}

/// || U Phi(f) U^{-1} - diag(Tf) ||_F, the defect of the multiplication
/// representation on one function.
inline double representation_defect(const CyclicDecomposition& dec,
                                    const BorelCalculus& c,
                                    const FuncExpr& f) {
  const ComplexMatrix lhs =
      dec.unitary * apply_fn(c, f) * dec.unitary.adjoint();
  const std::vector<cplx> tf = dec.multiplier_values(f, c.measure);
  ComplexMatrix rhs = ComplexMatrix::diagonal(tf);
  return (lhs - rhs).frobenius_norm();
}

}  // namespace borelcalc
