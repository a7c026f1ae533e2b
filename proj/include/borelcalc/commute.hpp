#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "borelcalc/calculus.hpp"
#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/eigen.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/expr_sampler.hpp"
#include "borelcalc/funcexpr.hpp"
#include "borelcalc/parser.hpp"
#include "borelcalc/pvm.hpp"
#include "borelcalc/report.hpp"

namespace borelcalc {

inline constexpr double kBatteryRel = 1e-7;
inline constexpr std::uint64_t kBatterySeed = 0xb007ed;

inline bool commutes(const ComplexMatrix& a, const ComplexMatrix& b,
                     double tol = kDefaultTol) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("commutes: dimensions differ");
  const double gap = commutator(a, b).frobenius_norm();
  return gap <= tol * std::max(1.0, a.frobenius_norm() * b.frobenius_norm());
}

/// || T A* - A* T || for normal A and T commuting with A. Fuglede's theorem
/// promises this residual vanishes; the non-normal counterexamples make it
/// order one.
inline double fuglede_verify(const ComplexMatrix& a, const ComplexMatrix& t,
                             double tol = kDefaultTol) {
  if (a.dim() != t.dim())
    throw DimensionMismatch("fuglede_verify: dimensions differ");
  const ComplexMatrix astar = a.adjoint();
  const double normal_gap = (astar * a - a * astar).frobenius_norm();
  if (normal_gap > tol * std::max(1.0, a.frobenius_norm() * a.frobenius_norm()))
    throw NotNormal("fuglede_verify: A is not normal (||A*A - AA*|| = " +
                    std::to_string(normal_gap) + ")");
  if (!commutes(t, a, tol))
    throw NotCommuting("fuglede_verify: T does not commute with A");
  return (t * astar - astar * t).frobenius_norm();
}

struct IntertwineEntry {
  std::string expr;
  double residual = 0.0;
  bool member = false;
};

struct IntertwineReport {
  std::vector<IntertwineEntry> probes;   // the supplied functions
  std::vector<IntertwineEntry> closure;  // derived members that must persist
  bool closure_ok = true;
  double tolerance = 0.0;
};

namespace detail {

inline double intertwine_residual(const BorelCalculus& phi,
                                  const BorelCalculus& psi,
                                  const ComplexMatrix& t, const FuncExpr& f) {
  const ComplexMatrix lhs = t * apply_fn(phi, f);
  const ComplexMatrix rhs = apply_fn(psi, f) * t;
  const double sc =
      std::max(1.0, t.frobenius_norm() * std::max(lhs.frobenius_norm(),
                                                  rhs.frobenius_norm()));
  return (lhs - rhs).frobenius_norm() / sc;
}

inline bool realvalued_on_atoms(const FuncExpr& f, const BorelCalculus& c,
                                double tol) {
  for (const auto& a : c.measure.atoms)
    if (std::abs(f.eval(a.point).imag()) > tol) return false;
  return true;
}

// (f + g + |f - g|)/2 and (f + g - |f - g|)/2
inline FuncExpr max_expr(const FuncExpr& f, const FuncExpr& g) {
  return FuncExpr::scalar(
      0.5, FuncExpr::add(FuncExpr::add(f, g),
                         FuncExpr::abs(FuncExpr::sub(f, g))));
}
inline FuncExpr min_expr(const FuncExpr& f, const FuncExpr& g) {
  return FuncExpr::scalar(
      0.5, FuncExpr::sub(FuncExpr::add(f, g),
                         FuncExpr::abs(FuncExpr::sub(f, g))));
}

}  // namespace detail

/// Membership probe for the intertwining set E(Phi, Psi; T) = { f : T Phi(f)
/// = Psi(f) T }, plus an audit of its *-algebra and lattice closure: sums,
/// products, conjugates, moduli, max/min of real-valued members, and
/// indicators of sublevel sets of members must stay members.
inline IntertwineReport intertwining_set_probe(const BorelCalculus& phi,
                                               const BorelCalculus& psi,
                                               const ComplexMatrix& t,
                                               const std::vector<FuncExpr>& fs,
                                               double tol = kBatteryRel) {
  if (t.dim() != phi.dim() || t.dim() != psi.dim())
    throw DimensionMismatch("intertwining_set_probe: dimensions differ");
  if (phi.arity() != psi.arity())
    throw ArityError("intertwining_set_probe: arities differ");
  IntertwineReport rep;
  rep.tolerance = tol;

  std::vector<FuncExpr> members;
  for (const auto& f : fs) {
    const double r = detail::intertwine_residual(phi, psi, t, f);
    const bool member = r <= tol;
    rep.probes.push_back({print_expr(f), r, member});
    if (member) members.push_back(f);
  }

  auto audit = [&](const FuncExpr& g, const std::string& label) {
    const double r = detail::intertwine_residual(phi, psi, t, g);
    const bool member = r <= tol;
    rep.closure.push_back({label, r, member});
    if (!member) rep.closure_ok = false;
  };

  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i; j < members.size(); ++j) {
      const FuncExpr& f = members[i];
      const FuncExpr& g = members[j];
      audit(FuncExpr::add(f, g), "sum");
      audit(FuncExpr::mul(f, g), "product");
      if (detail::realvalued_on_atoms(f, phi, 1e-12) &&
          detail::realvalued_on_atoms(g, phi, 1e-12) &&
          detail::realvalued_on_atoms(f, psi, 1e-12) &&
          detail::realvalued_on_atoms(g, psi, 1e-12)) {
        audit(detail::max_expr(f, g), "max");
        audit(detail::min_expr(f, g), "min");
      }
    }
    audit(FuncExpr::conj(members[i]), "conjugate");
    audit(FuncExpr::abs(members[i]), "modulus");
  }

  // indicators 1_{f in B} for Borel sets whose boundaries avoid the sampled
  // values of f (boundary-safe radii from the value gaps)
  for (const auto& f : members) {
    std::vector<double> mags;
    for (const auto& a : phi.measure.atoms)
      mags.push_back(std::abs(f.eval(a.point)));
    for (const auto& a : psi.measure.atoms)
      mags.push_back(std::abs(f.eval(a.point)));
    std::sort(mags.begin(), mags.end());
    std::vector<double> radii;
    for (std::size_t k = 0; k + 1 < mags.size(); ++k)
      if (mags[k + 1] - mags[k] > 1e-6)
        radii.push_back(0.5 * (mags[k] + mags[k + 1]));
    if (!mags.empty()) radii.push_back(mags.back() + 1.0);
    for (double r : radii) {
      BorelSetExpr b = BorelSetExpr::ball({cplx{}}, r, true);
      audit(FuncExpr::indicator(BorelSetExpr::preimage(f, b)),
            "indicator r=" + detail::format_double(r));
    }
  }
  return rep;
}

/// T = (1+A*A)^{-1}, S = A T, Z = A T^{1/2} for a normal matrix, together
/// with the measured residuals of the defining identities.
struct TransformTriple {
  ComplexMatrix t;
  ComplexMatrix s;
  ComplexMatrix z;
  CheckReport diagnostics;
};

inline TransformTriple bounded_transform(const ComplexMatrix& a,
                                         double tol = kDefaultTol) {
  const ComplexMatrix astar = a.adjoint();
  const double normal_gap = (astar * a - a * astar).frobenius_norm();
  const double scale = std::max(1.0, a.frobenius_norm());
  if (normal_gap > tol * scale * scale)
    throw NotNormal("bounded_transform: A is not normal");

  const std::size_t n = a.dim();
  const ComplexMatrix id = ComplexMatrix::identity(n);
  const ComplexMatrix t = inverse(id + astar * a);

  // T^{1/2} through the spectral calculus of the Hermitian matrix T
  EigResult eig = hermitian_eigendecompose(t, 1e-6);
  std::vector<cplx> roots(n);
  double min_eig = 1e300;
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eig.eigenvalues[k].real();
    min_eig = std::min(min_eig, lam);
    roots[k] = std::sqrt(std::max(0.0, lam));
  }
  if (min_eig <= 0.0)
    throw NotInvertible("bounded_transform: 1 + A*A is numerically singular");
  const ComplexMatrix thalf =
      eig.basis * ComplexMatrix::diagonal(roots) * eig.basis.adjoint();

  TransformTriple out;
  out.t = t;
  out.s = a * t;
  out.z = a * thalf;

  CheckReport& d = out.diagnostics;
  d.add("T norm <= 1", std::max(0.0, operator_norm(t) - 1.0), 1e-10);
  d.add("T positive definite", min_eig > 0.0 ? 0.0 : 1.0, 0.5,
        "smallest eigenvalue " + std::to_string(min_eig));
  d.add("Z contraction", std::max(0.0, operator_norm(out.z) - 1.0), 1e-12);
  d.add("T A = A T", commutator(t, a).frobenius_norm(), 1e-8 * scale);
  const ComplexMatrix sstar = out.s.adjoint();
  d.add("S normal", (sstar * out.s - out.s * sstar).frobenius_norm(),
        1e-8 * scale);
  // S* = S_{A*} with T_{A*} = T for normal A
  d.add("S adjoint matches A*", (sstar - astar * t).frobenius_norm(),
        1e-8 * scale);
  d.add("A = T^{-1} S", (a - inverse(t) * out.s).frobenius_norm(),
        1e-8 * scale * std::max(1.0, scale));
  d.add("T S = S T", commutator(t, out.s).frobenius_norm(), 1e-9 * scale);
  return out;
}

struct BatteryReport {
  // (i) AB = BA; (ii) B f(A) = f(A) B on sampled f; (iii) B Z_A = Z_A B;
  // (iv) B T_A = T_A B and B S_A = S_A B; (v) {T_A,S_A,T_B,S_B} pairwise
  // commute; (vi) Z_A Z_B = Z_B Z_A.
  bool direct = false, calculus = false, transform = false, ts_pair = false,
       strong = false, z_pair = false;
  double res_direct = 0, res_calculus = 0, res_transform = 0, res_ts_pair = 0,
         res_strong = 0, res_z_pair = 0;
  std::uint64_t seed = 0;

  bool all_agree() const {
    return direct == calculus && direct == transform && direct == ts_pair &&
           direct == strong && direct == z_pair;
  }
  bool verdict() const { return direct; }
};

/// The six equivalent formulations of strong commutativity, each measured
/// independently; the theorem says the six booleans always coincide.
inline BatteryReport strong_commute_battery(const ComplexMatrix& a,
                                            const ComplexMatrix& b,
                                            double tol = kBatteryRel,
                                            std::uint64_t seed = kBatterySeed,
                                            std::size_t fn_samples = 20) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("strong_commute_battery: dimensions differ");
  BatteryReport rep;
  rep.seed = seed;
  auto rel = [](const ComplexMatrix& x, const ComplexMatrix& y) {
    return commutator(x, y).frobenius_norm() /
           std::max(1.0, x.frobenius_norm() * y.frobenius_norm());
  };

  rep.res_direct = rel(a, b);
  rep.direct = rep.res_direct <= tol;

  BorelCalculus phi_a = calculus_from_normal(a);  // throws NotNormal if not
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < fn_samples; ++k) {
    FuncExpr f;
    switch (k % 4) {
      case 0: f = parse_expr("z1", 1); break;
      case 1: f = FuncExpr::indicator(sample_borel_set(rng, 1, 2)); break;
      default: f = sample_smooth_expr(rng, 1, 3); break;
    }
    worst = std::max(worst, rel(apply_fn(phi_a, f), b));
  }
  rep.res_calculus = worst;
  rep.calculus = worst <= tol;

  TransformTriple ta = bounded_transform(a);
  TransformTriple tb = bounded_transform(b);

  rep.res_transform = rel(ta.z, b);
  rep.transform = rep.res_transform <= tol;

  rep.res_ts_pair = std::max(rel(ta.t, b), rel(ta.s, b));
  rep.ts_pair = rep.res_ts_pair <= tol;

  const ComplexMatrix* quad[4] = {&ta.t, &ta.s, &tb.t, &tb.s};
  double strong_worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      strong_worst = std::max(strong_worst, rel(*quad[i], *quad[j]));
  rep.res_strong = strong_worst;
  rep.strong = strong_worst <= tol;

  rep.res_z_pair = rel(ta.z, tb.z);
  rep.z_pair = rep.res_z_pair <= tol;
  return rep;
}

/// Rebuild the Borel calculus of the original tuple from its (T_j, S_j)
/// pairs: joint calculus of (T_1..T_d, S_1..S_d) on C^{2d}, concentration
/// check on (0,1]^d x C^d, then push-forward along (t,s) -> s/t.
inline BorelCalculus reconstruct_from_transform(
    const std::vector<TransformTriple>& triples, double tol = kDefaultTol) {
  if (triples.empty())
    throw DimensionMismatch("reconstruct_from_transform: no input");
  const std::size_t d = triples.size();
  std::vector<ComplexMatrix> mats;
  for (const auto& tr : triples) mats.push_back(tr.t);
  for (const auto& tr : triples) mats.push_back(tr.s);
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j)
      if (!commutes(mats[i], mats[j], 100.0 * tol))
        throw NotCommuting(
            "reconstruct_from_transform: transforms " + std::to_string(i) +
            " and " + std::to_string(j) + " do not commute");

  BorelCalculus joint = joint_calculus(mats, 100.0 * tol);
  for (const auto& atom : joint.measure.atoms) {
    for (std::size_t j = 0; j < d; ++j) {
      const cplx t = atom.point[j];
      if (t.real() <= 1e-12)
        throw BadAtom(
            "reconstruct_from_transform: atom with t-coordinate " +
            std::to_string(t.real()) +
            " violates concentration on (0,1]^d");
    }
  }

  const int arity = static_cast<int>(2 * d);
  std::vector<FuncExpr> quotient;
  for (std::size_t j = 0; j < d; ++j)
    quotient.push_back(
        FuncExpr::div(FuncExpr::coord(static_cast<int>(d + j + 1), arity),
                      FuncExpr::coord(static_cast<int>(j + 1), arity)));
  return pushforward_calculus(joint, quotient);
}

}  // namespace borelcalc
