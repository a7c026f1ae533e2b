#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "borelcalc/calculus.hpp"
#include "borelcalc/parser.hpp"
#include "support/generators.hpp"

using namespace borelcalc;

namespace {

ComplexMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
  ComplexMatrix m(2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

std::vector<FuncExpr> standard_fs() {
  return {parse_expr("z1", 1), parse_expr("z1^2", 1), parse_expr("conj(z1)", 1)};
}

}  // namespace

TEST_CASE("apply_fn on fixed examples") {
  BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0, 3.0}));
  SECTION("unit maps to the identity") {
    REQUIRE((apply_fn(c, FuncExpr::constant(1.0, 1)) -
             ComplexMatrix::identity(3))
                .frobenius_norm() <= 1e-12);
  }
  SECTION("z^2 squares the diagonal") {
    ComplexMatrix m = apply_fn(c, parse_expr("z1^2", 1));
    REQUIRE((m - ComplexMatrix::diagonal({1.0, 4.0, 9.0})).frobenius_norm() <=
            1e-10);
  }
  SECTION("indicator picks the eigenprojection") {
    ComplexMatrix m = apply_fn(c, parse_expr("ind(singleton(1))", 1));
    REQUIRE((m - ComplexMatrix::diagonal({1.0, 0.0, 0.0})).frobenius_norm() <=
            1e-10);
  }
  SECTION("arity mismatch throws") {
    REQUIRE_THROWS_AS(apply_fn(c, FuncExpr::coord(1, 2)), ArityError);
  }
}

TEST_CASE("verify_mfc_axioms on a pvm-backed calculus") {
  std::mt19937_64 rng(17);
  BorelCalculus c = calculus_from_normal(testgen::random_normal(5, rng));
  CheckReport r = verify_mfc_axioms(c, standard_fs(), {});
  INFO("max residual " << r.max_residual());
  REQUIRE(r.all_pass());
  REQUIRE(r.max_residual() <= 1e-9);
}

TEST_CASE("a shifted map violates multiplicativity") {
  BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
  const double eps = 1e-3;
  ApplyMap mutant = [&](const FuncExpr& f) {
    return apply_fn(c, f) + eps * ComplexMatrix::identity(2);
  };
  CheckReport r = verify_mfc_axioms_map(mutant, 1, 2, support_of(c.measure),
                                        standard_fs(), {});
  const CheckRow* mfc1 = r.find("MFC1 unit");
  REQUIRE(mfc1 != nullptr);
  REQUIRE(mfc1->residual <= 2.0 * eps);      // passes "within eps"
  REQUIRE(mfc1->residual >= 0.5 * eps);
  const CheckRow* mfc3 = r.find("MFC3 multiplicativity");
  REQUIRE(mfc3 != nullptr);
  REQUIRE_FALSE(mfc3->pass);
  REQUIRE(mfc3->residual >= 0.1 * eps);      // eps-scale failure
  REQUIRE(mfc3->residual <= 100.0 * eps);
}

TEST_CASE("MFC5 on clamp sequences") {
  BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, -2.0}));
  FuncExpr z = parse_expr("z1", 1);
  BpSequence seq;
  for (double r = 0.5; r <= 4.0; r *= 2.0) seq.terms.push_back(FuncExpr::clamp(z, r));
  seq.limit = z;
  seq.bound = 4.0;
  CheckReport rep = verify_mfc_axioms(c, standard_fs(), {seq});
  const CheckRow* row = rep.find("MFC5 seq 0 limit");
  REQUIRE(row != nullptr);
  // clamp radius 4 exceeds the spectral radius 2, so the residual vanishes
  REQUIRE(row->residual == 0.0);
  REQUIRE(rep.all_pass());
}

TEST_CASE("restrict_to_subspace") {
  SECTION("restriction to the whole space") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    BorelCalculus r = restrict_to_subspace(c, ComplexMatrix::identity(2));
    REQUIRE(r.dim() == 2);
    REQUIRE(calculi_agree(c, r, {parse_expr("z1", 1)}).agree);
  }
  SECTION("restriction onto a two-dimensional eigenspace") {
    BorelCalculus c =
        calculus_from_normal(ComplexMatrix::diagonal({1.0, 1.0, 2.0}));
    BorelCalculus r =
        restrict_to_subspace(c, ComplexMatrix::diagonal({1.0, 1.0, 0.0}));
    REQUIRE(r.dim() == 2);
    REQUIRE(r.measure.atoms.size() == 1);
    REQUIRE(r.measure.atoms[0].point[0] == cplx(1.0, 0.0));
    REQUIRE((r.measure.atoms[0].proj - ComplexMatrix::identity(2))
                .frobenius_norm() <= 1e-10);
  }
  SECTION("non-invariant subspace is rejected") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    ComplexMatrix p = mat2(0.5, 0.5, 0.5, 0.5);  // projection onto span (1,1)
    REQUIRE_THROWS_AS(restrict_to_subspace(c, p), NotInvariant);
  }
}

TEST_CASE("pushforward_calculus composition rule") {
  SECTION("identity map changes nothing") {
    std::mt19937_64 rng(2);
    BorelCalculus c = calculus_from_normal(testgen::random_normal(4, rng));
    BorelCalculus r = pushforward_calculus(c, parse_expr("z1", 1));
    REQUIRE(calculi_agree(c, r, {parse_expr("z1", 1)}).agree);
  }
  SECTION("sqrt after squaring") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({-1.0, 1.0}));
    BorelCalculus pushed = pushforward_calculus(c, parse_expr("z1^2", 1));
    ComplexMatrix via_push = apply_fn(pushed, parse_expr("sqrt(z1)", 1));
    REQUIRE((via_push - ComplexMatrix::identity(2)).frobenius_norm() <= 1e-12);
    FuncExpr composed = FuncExpr::compose(parse_expr("sqrt(z1)", 1),
                                          {parse_expr("z1^2", 1)});
    REQUIRE((via_push - apply_fn(c, composed)).frobenius_norm() == 0.0);
  }
  SECTION("tuple map lands in C^2") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    std::vector<FuncExpr> phi = {parse_expr("z1", 1), parse_expr("z1^2", 1)};
    BorelCalculus r = pushforward_calculus(c, phi);
    REQUIRE(r.arity() == 2);
    REQUIRE(r.measure.atoms.size() == 2);
    bool seen11 = false, seen24 = false;
    for (const auto& a : r.measure.atoms) {
      if (a.point == Point{cplx(1, 0), cplx(1, 0)}) seen11 = true;
      if (a.point == Point{cplx(2, 0), cplx(4, 0)}) seen24 = true;
    }
    REQUIRE(seen11);
    REQUIRE(seen24);
  }
}

TEST_CASE("pullback_calculus relabels atoms") {
  BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
  SECTION("identity substitution") {
    BorelCalculus r = pullback_calculus(c, parse_expr("z1", 1));
    REQUIRE(calculi_agree(c, r, {parse_expr("z1", 1)}).agree);
  }
  SECTION("collapsing substitution merges projections") {
    BorelCalculus r = pullback_calculus(c, FuncExpr::constant(0.0, 1));
    REQUIRE(r.measure.atoms.size() == 1);
    REQUIRE((r.measure.atoms[0].proj - ComplexMatrix::identity(2))
                .frobenius_norm() <= 1e-12);
  }
  SECTION("injective relabeling keeps projections") {
    BorelCalculus r = pullback_calculus(c, parse_expr("z1+10", 1));
    REQUIRE(r.measure.atoms.size() == 2);
    for (std::size_t k = 0; k < 2; ++k)
      REQUIRE((r.measure.atoms[k].proj - c.measure.atoms[k].proj)
                  .frobenius_norm() == 0.0);
  }
}

TEST_CASE("joint_calculus") {
  SECTION("diagonal pair") {
    BorelCalculus c = joint_calculus(
        {ComplexMatrix::diagonal({1.0, 2.0}), ComplexMatrix::diagonal({3.0, 4.0})});
    REQUIRE(c.arity() == 2);
    REQUIRE((apply_fn(c, parse_expr("z1", 2)) -
             ComplexMatrix::diagonal({1.0, 2.0}))
                .frobenius_norm() <= 1e-10);
    REQUIRE((apply_fn(c, parse_expr("z2", 2)) -
             ComplexMatrix::diagonal({3.0, 4.0}))
                .frobenius_norm() <= 1e-10);
  }
  SECTION("shared eigenbasis pair multiplies correctly") {
    ComplexMatrix a = mat2(2, 1, 1, 2);
    ComplexMatrix b = mat2(0, 1, 1, 0);
    BorelCalculus c = joint_calculus({a, b});
    ComplexMatrix prod = apply_fn(c, parse_expr("z1*z2", 2));
    REQUIRE((prod - a * b).frobenius_norm() <= 1e-9);
  }
  SECTION("non-commuting tuple rejected") {
    REQUIRE_THROWS_AS(
        joint_calculus({ComplexMatrix::diagonal({1.0, 2.0}), mat2(0, 1, 1, 0)}),
        NotCommuting);
  }
  SECTION("atoms lie in the product of the individual spectra") {
    std::mt19937_64 rng(31);
    auto tup = testgen::commuting_tuple(5, 2, rng);
    BorelCalculus c = joint_calculus(tup);
    for (const auto& atom : c.measure.atoms) {
      for (std::size_t j = 0; j < tup.size(); ++j) {
        auto spec = support_of(pvm_from_normal(tup[j]));
        double best = 1e300;
        for (const auto& s : spec)
          best = std::min(best, std::abs(s[0] - atom.point[j]));
        REQUIRE(best <= 1e-7);
      }
    }
  }
}

TEST_CASE("selfadjoint_real_calculus") {
  SECTION("real diagonal") {
    BorelCalculus c = selfadjoint_real_calculus(ComplexMatrix::diagonal({1.0, 2.0}));
    for (const auto& a : c.measure.atoms) REQUIRE(a.point[0].imag() == 0.0);
  }
  SECTION("real symmetric with real projections") {
    BorelCalculus c = selfadjoint_real_calculus(mat2(2, 1, 1, 2));
    REQUIRE(c.measure.atoms.size() == 2);
    for (const auto& a : c.measure.atoms) {
      REQUIRE(a.point[0].imag() == 0.0);
      double imag_mass = 0.0, asym = 0.0;
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          imag_mass = std::max(imag_mass, std::abs(a.proj(i, j).imag()));
          asym = std::max(asym, std::abs(a.proj(i, j) - a.proj(j, i)));
        }
      REQUIRE(imag_mass <= 1e-9);
      REQUIRE(asym <= 1e-9);
    }
  }
  SECTION("normal but not self-adjoint input is rejected") {
    REQUIRE_THROWS_AS(selfadjoint_real_calculus(mat2(0, 1, -1, 0)),
                      NotSelfAdjoint);
  }
}

TEST_CASE("calculi_agree") {
  FuncExpr z = parse_expr("z1", 1);
  SECTION("a calculus agrees with itself") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    AgreeResult r = calculi_agree(c, c, {z});
    REQUIRE(r.agree);
    REQUIRE(r.functions_checked == 51);
  }
  SECTION("same operator through a swapped basis") {
    BorelCalculus a = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    ComplexMatrix swap = mat2(0, 1, 1, 0);
    ComplexMatrix b = swap * ComplexMatrix::diagonal({2.0, 1.0}) * swap.adjoint();
    BorelCalculus bc = calculus_from_normal(b);
    REQUIRE(calculi_agree(a, bc, {z}).agree);
  }
  SECTION("different operators disagree on z") {
    BorelCalculus a = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    BorelCalculus b = calculus_from_normal(ComplexMatrix::diagonal({1.0, 3.0}));
    REQUIRE_FALSE(calculi_agree(a, b, {z}).agree);
  }
  SECTION("dimension mismatch throws") {
    BorelCalculus a = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    BorelCalculus b = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0, 3.0}));
    REQUIRE_THROWS_AS(calculi_agree(a, b, {z}), DimensionMismatch);
  }
}

TEST_CASE("derived operator laws hold on random calculi") {
  std::mt19937_64 rng(404);
  for (int iter = 0; iter < 10; ++iter) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 5);
    BorelCalculus c = calculus_from_normal(testgen::random_normal(n, rng));
    FuncExpr f = sample_smooth_expr(rng, 1, 3);

    // adjoint law and normality of Phi(f)
    ComplexMatrix mf = apply_fn(c, f);
    ComplexMatrix mcf = apply_fn(c, FuncExpr::conj(f));
    REQUIRE((mcf - mf.adjoint()).frobenius_norm() <= 1e-9);
    ComplexMatrix abs2 =
        apply_fn(c, FuncExpr::mul(FuncExpr::conj(f), f));
    REQUIRE((mcf * mf - abs2).frobenius_norm() <=
            1e-9 * std::max(1.0, mf.frobenius_norm() * mf.frobenius_norm()));

    // norm identity: ||Phi(f)|| equals the sup of |f| over the atoms
    double sup = 0.0;
    for (const auto& at : c.measure.atoms)
      sup = std::max(sup, std::abs(f.eval(at.point)));
    REQUIRE(operator_norm(mf) == Catch::Approx(sup).margin(1e-9 * std::max(1.0, sup)));

    // polynomial identity p(f)
    std::vector<cplx> coeffs = {cplx(1.0, 0.5), cplx(-2.0, 0.0), cplx(0.0, 1.0)};
    FuncExpr pf = FuncExpr::add(
        FuncExpr::constant(coeffs[0], 1),
        FuncExpr::add(FuncExpr::scalar(coeffs[1], f),
                      FuncExpr::scalar(coeffs[2], FuncExpr::mul(f, f))));
    ComplexMatrix lhs = apply_fn(c, pf);
    ComplexMatrix rhs = matrix_poly_eval(coeffs, mf);
    REQUIRE((lhs - rhs).frobenius_norm() <=
            1e-8 * std::max(1.0, rhs.frobenius_norm()));
  }
}

TEST_CASE("monotonicity of the real calculus") {
  std::mt19937_64 rng(808);
  BorelCalculus c = calculus_from_normal(testgen::random_hermitian(5, rng));
  FuncExpr f = parse_expr("re(z1)", 1);
  FuncExpr g = parse_expr("re(z1)+0.5", 1);  // f <= g everywhere
  ComplexMatrix mf = apply_fn(c, f);
  ComplexMatrix mg = apply_fn(c, g);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<cplx> x(5);
    for (auto& z : x) z = {gauss(rng), gauss(rng)};
    const double qf = inner(x, mf.apply(x)).real();
    const double qg = inner(x, mg.apply(x)).real();
    REQUIRE(qf <= qg + 1e-9);
  }
}
