#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "borelcalc/calculus.hpp"
#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/funcexpr.hpp"
#include "borelcalc/pvm.hpp"

namespace borelcalc {

/// Truncation of a countable weighted measure space: N atoms, nonnegative
/// weights, complex labels (the embedding of the atom set into C that
/// multiplier functions are evaluated on). Unbounded multipliers show up as
/// divergence across increasing truncation levels, never as an infinite
/// object; every level-dependent answer carries its N.
struct DiscreteMeasureSpace {
  std::size_t atom_count = 0;
  std::vector<double> weights;
  std::vector<cplx> labels;

  static DiscreteMeasureSpace integer_labels(std::size_t n) {
    DiscreteMeasureSpace s;
    s.atom_count = n;
    s.weights.assign(n, 1.0);
    s.labels.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      s.labels[k] = cplx(static_cast<double>(k), 0.0);
    return s;
  }

  void validate() const {
    if (atom_count == 0 || weights.size() != atom_count ||
        labels.size() != atom_count)
      throw LengthMismatch("DiscreteMeasureSpace: inconsistent sizes");
    bool positive = false;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw Error("DiscreteMeasureSpace: weights must be finite and >= 0");
      if (w > 0.0) positive = true;
    }
    if (!positive)
      throw Error("DiscreteMeasureSpace: at least one weight must be positive");
    for (cplx l : labels)
      if (!std::isfinite(l.real()) || !std::isfinite(l.imag()))
        throw Error("DiscreteMeasureSpace: labels must be finite");
  }
};

using SeqVector = std::vector<cplx>;

/// Multiplication operator M_a on the truncated space: (M_a x)_k =
/// a(label_k) x_k.
struct MultOp {
  DiscreteMeasureSpace space;
  FuncExpr multiplier;  // arity 1, evaluated at the labels
};

inline SeqVector mult_apply(const MultOp& m, const SeqVector& x) {
  if (x.size() != m.space.atom_count)
    throw LengthMismatch("mult_apply: vector length " +
                         std::to_string(x.size()) + " vs space size " +
                         std::to_string(m.space.atom_count));
  SeqVector y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    y[k] = m.multiplier.eval({m.space.labels[k]}) * x[k];
  return y;
}

/// Operator norm of M_a per truncation level: max of |a| over the
/// positive-weight atoms among the first N. A diverging sequence is the
/// finite shadow of an unbounded multiplier.
inline std::vector<double> mult_norm_growth(const DiscreteMeasureSpace& space,
                                            const FuncExpr& multiplier,
                                            const std::vector<std::size_t>& ns) {
  space.validate();
  std::vector<double> out;
  out.reserve(ns.size());
  for (std::size_t n : ns) {
    if (n == 0 || n > space.atom_count)
      throw LengthMismatch("mult_norm_growth: truncation level " +
                           std::to_string(n) + " outside [1, " +
                           std::to_string(space.atom_count) + "]");
    double sup = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (space.weights[k] > 0.0)
        sup = std::max(sup, std::abs(multiplier.eval({space.labels[k]})));
    out.push_back(sup);
  }
  return out;
}

struct NullSetAnswer {
  bool mu_null = false;
  bool phi_null = false;
};

/// Two independent routes to nullity: summing the measure of B, and letting
/// the indicator multiplication operator act on every positive-weight basis
/// vector. On the (semi-finite) discrete space they must agree.
inline NullSetAnswer null_set_equivalence(const DiscreteMeasureSpace& space,
                                          const BorelSetExpr& b) {
  if (b.arity() != 1)
    throw ArityError("null_set_equivalence: set must have arity 1");
  space.validate();
  NullSetAnswer ans;

  double mass = 0.0;
  for (std::size_t k = 0; k < space.atom_count; ++k)
    if (b.member({space.labels[k]})) mass += space.weights[k];
  ans.mu_null = mass == 0.0;

  MultOp indicator{space, FuncExpr::indicator(b)};
  ans.phi_null = true;
  for (std::size_t k = 0; k < space.atom_count; ++k) {
    if (space.weights[k] <= 0.0) continue;
    SeqVector e(space.atom_count, cplx{});
    e[k] = 1.0;
    if (vec_norm(mult_apply(indicator, e)) != 0.0) {
      ans.phi_null = false;
      break;
    }
  }
  return ans;
}

inline FuncExpr default_regularizer(const FuncExpr& f) {
  // e = 1/(1 + |f|)
  return FuncExpr::inv(
      FuncExpr::add(FuncExpr::constant(1.0, f.arity()), FuncExpr::abs(f)));
}

inline FuncExpr square_regularizer(const FuncExpr& f) {
  // e' = 1/(1 + |f|^2)
  FuncExpr af = FuncExpr::abs(f);
  return FuncExpr::inv(FuncExpr::add(FuncExpr::constant(1.0, f.arity()),
                                     FuncExpr::mul(af, af)));
}

struct ExtensionReport {
  double max_discrepancy = 0.0;          // |solve(e) - direct f x|
  double regularizer_independence = 0.0; // |solve(e) - solve(e')|
  std::size_t samples = 0;
};

/// The algebraic extension identity Phi(f) = Phi(e)^{-1} Phi(e f) made
/// executable: solve Phi(e) y = Phi(e f) x coordinatewise and compare with
/// the direct action of f. A second regularizer must give the same y.
inline ExtensionReport algebraic_extension_check(
    const DiscreteMeasureSpace& space, const FuncExpr& f,
    const std::vector<SeqVector>& samples, FuncExpr e = {}, FuncExpr e2 = {}) {
  space.validate();
  if (f.arity() != 1)
    throw ArityError("algebraic_extension_check: multiplier must have arity 1");
  if (!e.valid()) e = default_regularizer(f);
  if (!e2.valid()) e2 = square_regularizer(f);

  for (std::size_t k = 0; k < space.atom_count; ++k) {
    if (space.weights[k] <= 0.0) continue;
    for (const FuncExpr* reg : {&e, &e2}) {
      const cplx val = reg->eval({space.labels[k]});
      if (val == cplx{})
        throw RegularizerVanishes(
            "algebraic_extension_check: regularizer vanishes at label " +
            std::to_string(k));
    }
  }

  const FuncExpr ef = FuncExpr::mul(e, f);
  const FuncExpr e2f = FuncExpr::mul(e2, f);
  ExtensionReport rep;
  for (const SeqVector& x : samples) {
    if (x.size() != space.atom_count)
      throw LengthMismatch("algebraic_extension_check: sample length");
    SeqVector y1(x.size()), y2(x.size()), direct(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const cplx label = space.labels[k];
      direct[k] = f.eval({label}) * x[k];
      const cplx e1v = e.eval({label});
      y1[k] = e1v == cplx{} ? cplx{} : (ef.eval({label}) * x[k]) / e1v;
      const cplx e2v = e2.eval({label});
      y2[k] = e2v == cplx{} ? cplx{} : (e2f.eval({label}) * x[k]) / e2v;
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (space.weights[k] <= 0.0) continue;
      rep.max_discrepancy =
          std::max(rep.max_discrepancy, std::abs(y1[k] - direct[k]));
      rep.regularizer_independence =
          std::max(rep.regularizer_independence, std::abs(y1[k] - y2[k]));
    }
    ++rep.samples;
  }
  return rep;
}

/// Truncation-level essential-range membership: a "true" is conclusive, a
/// "false" only speaks for the first atom_count atoms.
inline bool essran_membership(const DiscreteMeasureSpace& space,
                              const FuncExpr& f, cplx lambda, double eps) {
  space.validate();
  if (!(eps > 0.0)) throw Error("essran_membership: eps must be positive");
  for (std::size_t k = 0; k < space.atom_count; ++k) {
    if (space.weights[k] <= 0.0) continue;
    if (std::abs(f.eval({space.labels[k]}) - lambda) <= eps) return true;
  }
  return false;
}

struct TransformFns {
  FuncExpr t;     // 1/(1+|f|^2)
  FuncExpr s;     // f/(1+|f|^2)
  FuncExpr zeta;  // f/sqrt(1+|f|^2)
};

/// The symbols of the (T, S) pair and of the bounded transform, as
/// expressions in f.
inline TransformFns transform_functions(const FuncExpr& f) {
  if (f.arity() != 1) throw ArityError("transform_functions: arity must be 1");
  FuncExpr one = FuncExpr::constant(1.0, 1);
  FuncExpr af = FuncExpr::abs(f);
  FuncExpr denom = FuncExpr::add(one, FuncExpr::mul(af, af));
  TransformFns out;
  out.t = FuncExpr::inv(denom);
  out.s = FuncExpr::mul(f, out.t);
  out.zeta = FuncExpr::mul(f, FuncExpr::inv(FuncExpr::sqrt(denom)));
  return out;
}

/// Pointwise identities s/t = f and zeta/sqrt(1-|zeta|^2) = f at the labels
/// of a space. The second identity is measured in the multiplied-out form
/// zeta = f sqrt(1-|zeta|^2), and both residuals are relative to max(1,|f|);
/// dividing by 1-|zeta|^2 directly would amplify rounding quadratically in
/// |f| and drown the identity.
inline double transform_identity_defect(const TransformFns& fns,
                                        const FuncExpr& f,
                                        const DiscreteMeasureSpace& space) {
  space.validate();
  double worst = 0.0;
  for (std::size_t k = 0; k < space.atom_count; ++k) {
    const cplx z = space.labels[k];
    const cplx fv = f.eval({z});
    const cplx tv = fns.t.eval({z});
    const cplx sv = fns.s.eval({z});
    const cplx zv = fns.zeta.eval({z});
    const double scale = std::max(1.0, std::abs(fv));
    worst = std::max(worst, std::abs(sv / tv - fv) / scale);
    const double rem = std::sqrt(std::max(0.0, 1.0 - std::norm(zv)));
    worst = std::max(worst, std::abs(zv - fv * rem) / scale);
  }
  return worst;
}

/// PVM form of the multiplication calculus on the truncated space: the
/// positive-weight coordinates, deduplicated by label, with coordinate
/// projections. Zero-weight atoms are invisible to l^2(mu) and are dropped
/// together with their coordinates.
inline BorelCalculus calculus_from_space(const DiscreteMeasureSpace& space) {
  space.validate();
  std::vector<std::size_t> live;
  for (std::size_t k = 0; k < space.atom_count; ++k)
    if (space.weights[k] > 0.0) live.push_back(k);
  const std::size_t dim = live.size();

  PVM pvm;
  pvm.d = 1;
  pvm.dim = dim;
  for (std::size_t i = 0; i < live.size(); ++i) {
    const cplx label = space.labels[live[i]];
    bool merged = false;
    for (auto& atom : pvm.atoms) {
      if (atom.point[0] == label) {
        atom.proj(i, i) = 1.0;
        merged = true;
        break;
      }
    }
    if (!merged) {
      ComplexMatrix p = ComplexMatrix::zero(dim);
      p(i, i) = 1.0;
      pvm.atoms.push_back({{label}, std::move(p)});
    }
  }
  detail::sort_atoms(pvm.atoms);
  return {std::move(pvm)};
}

}  // namespace borelcalc
