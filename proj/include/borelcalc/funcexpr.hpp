#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/errors.hpp"

namespace borelcalc {

class FuncExpr;
class BorelSetExpr;

enum class FnKind {
  Const,
  Coord,
  Add,
  Mul,
  Neg,
  Conj,
  Abs,
  Re,
  Im,
  Inv,   // pointwise 1/x with 0 -> 0
  Sqrt,  // principal branch
  Exp,
  Indicator,
  Compose,
  Clamp  // z if |z| <= r, else r z/|z|
};

enum class SetKind {
  Ball,
  HalfPlane,
  Complement,
  Union,
  Intersection,
  Preimage,
  Singleton,
  Empty,
  Full
};

enum class Axis { Re, Im };

namespace detail {
struct FnNode;
struct SetNode;
}  // namespace detail

/// Evaluable Borel subset of C^d. Immutable; cheap to copy.
class BorelSetExpr {
 public:
  BorelSetExpr() = default;

  static BorelSetExpr ball(std::vector<cplx> center, double radius,
                           bool closed);
  static BorelSetExpr half_plane(int coord, Axis axis, double threshold,
                                 bool strict, int arity);
  static BorelSetExpr complement(BorelSetExpr s);
  static BorelSetExpr set_union(std::vector<BorelSetExpr> parts);
  static BorelSetExpr set_intersection(std::vector<BorelSetExpr> parts);
  static BorelSetExpr preimage(FuncExpr f, BorelSetExpr target);
  static BorelSetExpr singleton(std::vector<cplx> point);
  static BorelSetExpr empty(int arity);
  static BorelSetExpr full(int arity);

  int arity() const { return d_; }
  bool valid() const { return node_ != nullptr; }
  const detail::SetNode& node() const { return *node_; }

  bool member(std::span<const cplx> p) const;
  bool member(std::initializer_list<cplx> p) const {
    return member(std::span<const cplx>(p.begin(), p.size()));
  }

 private:
  BorelSetExpr(std::shared_ptr<const detail::SetNode> node, int d)
      : node_(std::move(node)), d_(d) {}

  std::shared_ptr<const detail::SetNode> node_;
  int d_ = 0;
};

/// Evaluable Borel function C^d -> C. Total by construction (Inv maps 0 to
/// 0); immutable and cheap to copy.
class FuncExpr {
 public:
  FuncExpr() = default;

  static FuncExpr constant(cplx value, int arity);
  static FuncExpr coord(int j, int arity);
  static FuncExpr add(FuncExpr a, FuncExpr b);
  static FuncExpr mul(FuncExpr a, FuncExpr b);
  static FuncExpr scalar(cplx c, FuncExpr f);
  static FuncExpr neg(FuncExpr f);
  static FuncExpr conj(FuncExpr f);
  static FuncExpr abs(FuncExpr f);
  static FuncExpr re(FuncExpr f);
  static FuncExpr im(FuncExpr f);
  static FuncExpr inv(FuncExpr f);
  static FuncExpr sqrt(FuncExpr f);
  static FuncExpr exp(FuncExpr f);
  static FuncExpr indicator(BorelSetExpr set);
  static FuncExpr compose(FuncExpr outer, std::vector<FuncExpr> inners);
  static FuncExpr clamp(FuncExpr f, double radius);

  /// f - g and f/g as derived combinations.
  static FuncExpr sub(FuncExpr a, FuncExpr b) { return add(std::move(a), neg(std::move(b))); }
  static FuncExpr div(FuncExpr a, FuncExpr b) { return mul(std::move(a), inv(std::move(b))); }
  static FuncExpr pow(FuncExpr base, unsigned n);

  int arity() const { return d_; }
  bool valid() const { return node_ != nullptr; }
  const detail::FnNode& node() const { return *node_; }

  cplx eval(std::span<const cplx> p) const;
  cplx eval(std::initializer_list<cplx> p) const {
    return eval(std::span<const cplx>(p.begin(), p.size()));
  }

 private:
  FuncExpr(std::shared_ptr<const detail::FnNode> node, int d)
      : node_(std::move(node)), d_(d) {}

  static FuncExpr make(FnKind kind, int d, std::vector<FuncExpr> args);
  static FuncExpr unary(FnKind kind, FuncExpr f);

  std::shared_ptr<const detail::FnNode> node_;
  int d_ = 0;
};

namespace detail {

struct FnNode {
  FnKind kind{};
  cplx value{};        // Const
  int coord = 0;       // Coord (1-based)
  double radius = 0;   // Clamp
  std::vector<FuncExpr> args;  // children; Compose: args[0] = outer, rest inners
  BorelSetExpr set;    // Indicator
};

struct SetNode {
  SetKind kind{};
  std::vector<cplx> center;  // Ball / Singleton
  double radius = 0;         // Ball
  bool closed = true;        // Ball
  int coord = 0;             // HalfPlane (1-based)
  Axis axis = Axis::Re;      // HalfPlane
  double threshold = 0;      // HalfPlane
  bool strict = false;       // HalfPlane
  std::vector<BorelSetExpr> parts;  // Complement / Union / Intersection / Preimage target
  std::vector<FuncExpr> fn;         // Preimage map
};

inline void require_finite(cplx z, const char* who) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw Error(std::string(who) + ": non-finite constant");
}

}  // namespace detail

// ---- BorelSetExpr factories ----

inline BorelSetExpr BorelSetExpr::ball(std::vector<cplx> center, double radius,
                                       bool closed) {
  if (center.empty()) throw ArityError("ball: empty center");
  if (!(radius >= 0.0)) throw Error("ball: radius must be >= 0");
  for (cplx c : center) detail::require_finite(c, "ball");
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Ball;
  n->center = std::move(center);
  n->radius = radius;
  n->closed = closed;
  const int d = static_cast<int>(n->center.size());
  return BorelSetExpr(std::move(n), d);
}

inline BorelSetExpr BorelSetExpr::half_plane(int coord, Axis axis,
                                             double threshold, bool strict,
                                             int arity) {
  if (coord < 1 || coord > arity)
    throw ArityError("half_plane: coordinate z" + std::to_string(coord) +
                     " out of range for arity " + std::to_string(arity));
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::HalfPlane;
  n->coord = coord;
  n->axis = axis;
  n->threshold = threshold;
  n->strict = strict;
  return BorelSetExpr(std::move(n), arity);
}

inline BorelSetExpr BorelSetExpr::complement(BorelSetExpr s) {
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Complement;
  const int d = s.arity();
  n->parts.push_back(std::move(s));
  return BorelSetExpr(std::move(n), d);
}

inline BorelSetExpr BorelSetExpr::set_union(std::vector<BorelSetExpr> parts) {
  if (parts.empty()) throw ArityError("union: no operands");
  const int d = parts.front().arity();
  for (const auto& p : parts)
    if (p.arity() != d) throw ArityError("union: mixed arities");
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Union;
  n->parts = std::move(parts);
  return BorelSetExpr(std::move(n), d);
}

inline BorelSetExpr BorelSetExpr::set_intersection(
    std::vector<BorelSetExpr> parts) {
  if (parts.empty()) throw ArityError("inter: no operands");
  const int d = parts.front().arity();
  for (const auto& p : parts)
    if (p.arity() != d) throw ArityError("inter: mixed arities");
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Intersection;
  n->parts = std::move(parts);
  return BorelSetExpr(std::move(n), d);
}

inline BorelSetExpr BorelSetExpr::preimage(FuncExpr f, BorelSetExpr target) {
  if (target.arity() != 1)
    throw ArityError("preimage: target set must have arity 1");
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Preimage;
  const int d = f.arity();
  n->fn.push_back(std::move(f));
  n->parts.push_back(std::move(target));
  return BorelSetExpr(std::move(n), d);
}

inline BorelSetExpr BorelSetExpr::singleton(std::vector<cplx> point) {
  if (point.empty()) throw ArityError("singleton: empty point");
  for (cplx c : point) detail::require_finite(c, "singleton");
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Singleton;
  n->center = std::move(point);
  const int d = static_cast<int>(n->center.size());
  return BorelSetExpr(std::move(n), d);
}

inline BorelSetExpr BorelSetExpr::empty(int arity) {
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Empty;
  return BorelSetExpr(std::move(n), arity);
}

inline BorelSetExpr BorelSetExpr::full(int arity) {
  auto n = std::make_shared<detail::SetNode>();
  n->kind = SetKind::Full;
  return BorelSetExpr(std::move(n), arity);
}

inline bool BorelSetExpr::member(std::span<const cplx> p) const {
  if (static_cast<int>(p.size()) != d_)
    throw ArityError("member: point has arity " + std::to_string(p.size()) +
                     ", set has arity " + std::to_string(d_));
  const detail::SetNode& n = *node_;
  switch (n.kind) {
    case SetKind::Ball: {
      double dist2 = 0.0;
      for (std::size_t k = 0; k < n.center.size(); ++k)
        dist2 += std::norm(p[k] - n.center[k]);
      const double r2 = n.radius * n.radius;
      return n.closed ? dist2 <= r2 : dist2 < r2;
    }
    case SetKind::HalfPlane: {
      const cplx z = p[static_cast<std::size_t>(n.coord - 1)];
      const double v = n.axis == Axis::Re ? z.real() : z.imag();
      return n.strict ? v < n.threshold : v <= n.threshold;
    }
    case SetKind::Complement:
      return !n.parts[0].member(p);
    case SetKind::Union:
      for (const auto& s : n.parts)
        if (s.member(p)) return true;
      return false;
    case SetKind::Intersection:
      for (const auto& s : n.parts)
        if (!s.member(p)) return false;
      return true;
    case SetKind::Preimage: {
      const cplx image = n.fn[0].eval(p);
      return n.parts[0].member({&image, 1});
    }
    case SetKind::Singleton:
      for (std::size_t k = 0; k < n.center.size(); ++k)
        if (p[k] != n.center[k]) return false;
      return true;
    case SetKind::Empty:
      return false;
    case SetKind::Full:
      return true;
  }
  return false;
}

// ---- FuncExpr factories ----

inline FuncExpr FuncExpr::make(FnKind kind, int d, std::vector<FuncExpr> args) {
  auto n = std::make_shared<detail::FnNode>();
  n->kind = kind;
  n->args = std::move(args);
  return FuncExpr(std::move(n), d);
}

inline FuncExpr FuncExpr::unary(FnKind kind, FuncExpr f) {
  const int d = f.arity();
  return make(kind, d, {std::move(f)});
}

inline FuncExpr FuncExpr::constant(cplx value, int arity) {
  detail::require_finite(value, "constant");
  if (arity < 1) throw ArityError("constant: arity must be >= 1");
  auto n = std::make_shared<detail::FnNode>();
  n->kind = FnKind::Const;
  n->value = value;
  return FuncExpr(std::move(n), arity);
}

inline FuncExpr FuncExpr::coord(int j, int arity) {
  if (j < 1 || j > arity)
    throw ArityError("coord: z" + std::to_string(j) +
                     " out of range for arity " + std::to_string(arity));
  auto n = std::make_shared<detail::FnNode>();
  n->kind = FnKind::Coord;
  n->coord = j;
  return FuncExpr(std::move(n), arity);
}

namespace detail {
inline void require_same_arity(const FuncExpr& a, const FuncExpr& b,
                               const char* who) {
  if (a.arity() != b.arity())
    throw ArityError(std::string(who) + ": arities differ (" +
                     std::to_string(a.arity()) + " vs " +
                     std::to_string(b.arity()) + ")");
}
}  // namespace detail

inline FuncExpr FuncExpr::add(FuncExpr a, FuncExpr b) {
  detail::require_same_arity(a, b, "add");
  const int d = a.arity();
  if (a.node().kind == FnKind::Const && b.node().kind == FnKind::Const)
    return constant(a.node().value + b.node().value, d);
  return make(FnKind::Add, d, {std::move(a), std::move(b)});
}

inline FuncExpr FuncExpr::mul(FuncExpr a, FuncExpr b) {
  detail::require_same_arity(a, b, "mul");
  const int d = a.arity();
  if (a.node().kind == FnKind::Const && b.node().kind == FnKind::Const)
    return constant(a.node().value * b.node().value, d);
  return make(FnKind::Mul, d, {std::move(a), std::move(b)});
}

inline FuncExpr FuncExpr::scalar(cplx c, FuncExpr f) {
  const int d = f.arity();
  return mul(constant(c, d), std::move(f));
}

inline FuncExpr FuncExpr::neg(FuncExpr f) {
  if (f.node().kind == FnKind::Const)
    return constant(-f.node().value, f.arity());
  return unary(FnKind::Neg, std::move(f));
}

inline FuncExpr FuncExpr::conj(FuncExpr f) { return unary(FnKind::Conj, std::move(f)); }
inline FuncExpr FuncExpr::abs(FuncExpr f) { return unary(FnKind::Abs, std::move(f)); }
inline FuncExpr FuncExpr::re(FuncExpr f) { return unary(FnKind::Re, std::move(f)); }
inline FuncExpr FuncExpr::im(FuncExpr f) { return unary(FnKind::Im, std::move(f)); }
inline FuncExpr FuncExpr::inv(FuncExpr f) { return unary(FnKind::Inv, std::move(f)); }
inline FuncExpr FuncExpr::sqrt(FuncExpr f) { return unary(FnKind::Sqrt, std::move(f)); }
inline FuncExpr FuncExpr::exp(FuncExpr f) { return unary(FnKind::Exp, std::move(f)); }

inline FuncExpr FuncExpr::indicator(BorelSetExpr set) {
  auto n = std::make_shared<detail::FnNode>();
  n->kind = FnKind::Indicator;
  const int d = set.arity();
  n->set = std::move(set);
  return FuncExpr(std::move(n), d);
}

inline FuncExpr FuncExpr::compose(FuncExpr outer,
                                  std::vector<FuncExpr> inners) {
  if (outer.arity() != static_cast<int>(inners.size()))
    throw ArityError("compose: outer arity " + std::to_string(outer.arity()) +
                     " vs " + std::to_string(inners.size()) + " inner maps");
  if (inners.empty()) throw ArityError("compose: no inner maps");
  const int d = inners.front().arity();
  for (const auto& g : inners)
    if (g.arity() != d) throw ArityError("compose: mixed inner arities");
  std::vector<FuncExpr> args;
  args.reserve(inners.size() + 1);
  args.push_back(std::move(outer));
  for (auto& g : inners) args.push_back(std::move(g));
  return make(FnKind::Compose, d, std::move(args));
}

inline FuncExpr FuncExpr::clamp(FuncExpr f, double radius) {
  if (!(radius >= 0.0)) throw Error("clamp: radius must be >= 0");
  const int d = f.arity();
  auto n = std::make_shared<detail::FnNode>();
  n->kind = FnKind::Clamp;
  n->radius = radius;
  n->args.push_back(std::move(f));
  return FuncExpr(std::move(n), d);
}

inline FuncExpr FuncExpr::pow(FuncExpr base, unsigned n) {
  const int d = base.arity();
  if (n == 0) return constant(1.0, d);
  FuncExpr acc = base;
  for (unsigned k = 1; k < n; ++k) acc = mul(std::move(acc), base);
  return acc;
}

inline cplx FuncExpr::eval(std::span<const cplx> p) const {
  if (static_cast<int>(p.size()) != d_)
    throw ArityError("eval: point has arity " + std::to_string(p.size()) +
                     ", function has arity " + std::to_string(d_));
  const detail::FnNode& n = *node_;
  switch (n.kind) {
    case FnKind::Const:
      return n.value;
    case FnKind::Coord:
      return p[static_cast<std::size_t>(n.coord - 1)];
    case FnKind::Add:
      return n.args[0].eval(p) + n.args[1].eval(p);
    case FnKind::Mul:
      return n.args[0].eval(p) * n.args[1].eval(p);
    case FnKind::Neg:
      return -n.args[0].eval(p);
    case FnKind::Conj:
      return std::conj(n.args[0].eval(p));
    case FnKind::Abs:
      return {std::abs(n.args[0].eval(p)), 0.0};
    case FnKind::Re:
      return {n.args[0].eval(p).real(), 0.0};
    case FnKind::Im:
      return {n.args[0].eval(p).imag(), 0.0};
    case FnKind::Inv: {
      const cplx z = n.args[0].eval(p);
      if (z.real() == 0.0 && z.imag() == 0.0) return {0.0, 0.0};
      return 1.0 / z;
    }
    case FnKind::Sqrt:
      return std::sqrt(n.args[0].eval(p));
    case FnKind::Exp:
      return std::exp(n.args[0].eval(p));
    case FnKind::Indicator:
      return {n.set.member(p) ? 1.0 : 0.0, 0.0};
    case FnKind::Compose: {
      std::vector<cplx> q(n.args.size() - 1);
      for (std::size_t k = 1; k < n.args.size(); ++k) q[k - 1] = n.args[k].eval(p);
      return n.args[0].eval(q);
    }
    case FnKind::Clamp: {
      const cplx z = n.args[0].eval(p);
      const double m = std::abs(z);
      if (m <= n.radius) return z;
      return z * (n.radius / m);
    }
  }
  return {};
}

// ---- structural equality (used by the parser round-trip contract) ----

inline bool structurally_equal(const BorelSetExpr& a, const BorelSetExpr& b);

inline bool structurally_equal(const FuncExpr& a, const FuncExpr& b) {
  if (a.arity() != b.arity()) return false;
  const detail::FnNode& x = a.node();
  const detail::FnNode& y = b.node();
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case FnKind::Const:
      return x.value == y.value;
    case FnKind::Coord:
      return x.coord == y.coord;
    case FnKind::Clamp:
      if (x.radius != y.radius) return false;
      break;
    case FnKind::Indicator:
      return structurally_equal(x.set, y.set);
    default:
      break;
  }
  if (x.args.size() != y.args.size()) return false;
  for (std::size_t k = 0; k < x.args.size(); ++k)
    if (!structurally_equal(x.args[k], y.args[k])) return false;
  return true;
}

inline bool structurally_equal(const BorelSetExpr& a, const BorelSetExpr& b) {
  if (a.arity() != b.arity()) return false;
  const detail::SetNode& x = a.node();
  const detail::SetNode& y = b.node();
  if (x.kind != y.kind) return false;
  if (x.center != y.center || x.radius != y.radius || x.closed != y.closed ||
      x.coord != y.coord || x.axis != y.axis || x.threshold != y.threshold ||
      x.strict != y.strict)
    return false;
  if (x.fn.size() != y.fn.size() || x.parts.size() != y.parts.size())
    return false;
  for (std::size_t k = 0; k < x.fn.size(); ++k)
    if (!structurally_equal(x.fn[k], y.fn[k])) return false;
  for (std::size_t k = 0; k < x.parts.size(); ++k)
    if (!structurally_equal(x.parts[k], y.parts[k])) return false;
  return true;
}

}  // namespace borelcalc
