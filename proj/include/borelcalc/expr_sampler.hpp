#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "borelcalc/funcexpr.hpp"

namespace borelcalc {

// Seeded generators of random Borel-function expressions.
//
// sample_smooth_expr draws from a pool of Lipschitz-bounded building blocks
// (no indicators, no Inv, no Sqrt): suitable when two operator routes are
// compared and the atom points may differ at rounding level.
//
// sample_any_expr additionally produces indicators, inversions, square
// roots and compositions; it exercises the full grammar.

namespace detail {

inline cplx small_const(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return {u(rng), u(rng)};
}

inline FuncExpr smooth_rec(std::mt19937_64& rng, int d, int depth) {
  std::uniform_int_distribution<int> coin(0, 9);
  std::uniform_int_distribution<int> coords(1, d);
  if (depth <= 0) {
    switch (coin(rng) % 3) {
      case 0: return FuncExpr::constant(small_const(rng), d);
      default: return FuncExpr::coord(coords(rng), d);
    }
  }
  switch (coin(rng)) {
    case 0:
      return FuncExpr::add(smooth_rec(rng, d, depth - 1),
                           smooth_rec(rng, d, depth - 1));
    case 1:
      return FuncExpr::mul(smooth_rec(rng, d, depth - 1),
                           smooth_rec(rng, d, depth - 1));
    case 2: return FuncExpr::neg(smooth_rec(rng, d, depth - 1));
    case 3: return FuncExpr::conj(smooth_rec(rng, d, depth - 1));
    case 4: return FuncExpr::abs(smooth_rec(rng, d, depth - 1));
    case 5: return FuncExpr::re(smooth_rec(rng, d, depth - 1));
    case 6: return FuncExpr::im(smooth_rec(rng, d, depth - 1));
    case 7: {
      std::uniform_real_distribution<double> r(0.5, 4.0);
      return FuncExpr::clamp(smooth_rec(rng, d, depth - 1), r(rng));
    }
    case 8:
      // exponential tamed by a clamp so magnitudes stay desk-scale
      return FuncExpr::exp(FuncExpr::clamp(smooth_rec(rng, d, depth - 1), 2.0));
    default:
      return FuncExpr::coord(coords(rng), d);
  }
}

inline BorelSetExpr sample_set_rec(std::mt19937_64& rng, int d, int depth);

inline FuncExpr any_rec(std::mt19937_64& rng, int d, int depth) {
  std::uniform_int_distribution<int> coin(0, 13);
  std::uniform_int_distribution<int> coords(1, d);
  if (depth <= 0) {
    switch (coin(rng) % 3) {
      case 0: return FuncExpr::constant(small_const(rng), d);
      default: return FuncExpr::coord(coords(rng), d);
    }
  }
  switch (coin(rng)) {
    case 0:
      return FuncExpr::add(any_rec(rng, d, depth - 1), any_rec(rng, d, depth - 1));
    case 1:
      return FuncExpr::mul(any_rec(rng, d, depth - 1), any_rec(rng, d, depth - 1));
    case 2: return FuncExpr::neg(any_rec(rng, d, depth - 1));
    case 3: return FuncExpr::conj(any_rec(rng, d, depth - 1));
    case 4: return FuncExpr::abs(any_rec(rng, d, depth - 1));
    case 5: return FuncExpr::re(any_rec(rng, d, depth - 1));
    case 6: return FuncExpr::im(any_rec(rng, d, depth - 1));
    case 7: return FuncExpr::inv(any_rec(rng, d, depth - 1));
    case 8: return FuncExpr::sqrt(any_rec(rng, d, depth - 1));
    case 9:
      return FuncExpr::exp(FuncExpr::clamp(any_rec(rng, d, depth - 1), 3.0));
    case 10: {
      std::uniform_real_distribution<double> r(0.0, 4.0);
      return FuncExpr::clamp(any_rec(rng, d, depth - 1), r(rng));
    }
    case 11:
      return FuncExpr::indicator(sample_set_rec(rng, d, depth - 1));
    case 12: {
      std::uniform_int_distribution<int> mdist(1, 2);
      const int m = mdist(rng);
      FuncExpr outer = any_rec(rng, m, depth - 1);
      std::vector<FuncExpr> inners;
      for (int k = 0; k < m; ++k) inners.push_back(any_rec(rng, d, depth - 1));
      return FuncExpr::compose(std::move(outer), std::move(inners));
    }
    default:
      return FuncExpr::coord(coords(rng), d);
  }
}

inline BorelSetExpr sample_set_rec(std::mt19937_64& rng, int d, int depth) {
  std::uniform_int_distribution<int> coin(0, 8);
  std::uniform_int_distribution<int> coords(1, d);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> radius(0.1, 3.0);
  const int pick = depth <= 0 ? coin(rng) % 4 : coin(rng);
  switch (pick) {
    case 0: {
      std::vector<cplx> c(static_cast<std::size_t>(d));
      for (auto& z : c) z = {u(rng), u(rng)};
      return BorelSetExpr::ball(std::move(c), radius(rng), rng() % 2 == 0);
    }
    case 1:
      return BorelSetExpr::half_plane(coords(rng), rng() % 2 ? Axis::Re : Axis::Im,
                                      u(rng), rng() % 2 == 0, d);
    case 2:
      return BorelSetExpr::empty(d);
    case 3:
      return BorelSetExpr::full(d);
    case 4:
      return BorelSetExpr::complement(sample_set_rec(rng, d, depth - 1));
    case 5:
      return BorelSetExpr::set_union(
          {sample_set_rec(rng, d, depth - 1), sample_set_rec(rng, d, depth - 1)});
    case 6:
      return BorelSetExpr::set_intersection(
          {sample_set_rec(rng, d, depth - 1), sample_set_rec(rng, d, depth - 1)});
    case 7: {
      std::vector<cplx> c(static_cast<std::size_t>(d));
      for (auto& z : c) z = {u(rng), u(rng)};
      return BorelSetExpr::singleton(std::move(c));
    }
    default:
      return BorelSetExpr::preimage(any_rec(rng, d, depth - 1),
                                    sample_set_rec(rng, 1, depth - 1));
  }
}

}  // namespace detail

inline FuncExpr sample_smooth_expr(std::mt19937_64& rng, int d, int depth = 4) {
  return detail::smooth_rec(rng, d, depth);
}

inline FuncExpr sample_any_expr(std::mt19937_64& rng, int d, int depth = 4) {
  return detail::any_rec(rng, d, depth);
}

inline BorelSetExpr sample_borel_set(std::mt19937_64& rng, int d, int depth = 3) {
  return detail::sample_set_rec(rng, d, depth);
}

}  // namespace borelcalc
