#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "borelcalc/parser.hpp"
#include "borelcalc/spectral.hpp"
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

bool contains(const std::vector<cplx>& set, cplx v, double tol = 1e-9) {
  for (const cplx& s : set)
    if (std::abs(s - v) <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("essential_range") {
  SECTION("identity function sees the spectrum") {
    BorelCalculus c =
        calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0, 2.0}));
    auto r = essential_range(c, parse_expr("z1", 1));
    REQUIRE(r.size() == 2);
    REQUIRE(contains(r, 1.0));
    REQUIRE(contains(r, 2.0));
  }
  SECTION("indicator image is {0, 1}") {
    BorelCalculus c =
        calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0, 3.0}));
    auto r = essential_range(c, parse_expr("ind(singleton(2))", 1));
    REQUIRE(r.size() == 2);
    REQUIRE(contains(r, 0.0));
    REQUIRE(contains(r, 1.0));
  }
  SECTION("rotation matrix has range {i, -i}") {
    BorelCalculus c = calculus_from_normal(mat2(0, 1, -1, 0));
    auto r = essential_range(c, parse_expr("z1", 1));
    REQUIRE(r.size() == 2);
    REQUIRE(contains(r, cplx(0, 1)));
    REQUIRE(contains(r, cplx(0, -1)));
  }
}

TEST_CASE("spectral_report") {
  SECTION("squaring a two-point spectrum") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    SpectralReport rep = spectral_report(c, parse_expr("z1^2", 1));
    REQUIRE(rep.spectrum.size() == 2);
    REQUIRE(contains(rep.spectrum, 1.0));
    REQUIRE(contains(rep.spectrum, 4.0));
    const ComplexMatrix* p4 = rep.projection_at(4.0);
    REQUIRE(p4 != nullptr);
    REQUIRE((*p4 - ComplexMatrix::diagonal({0.0, 1.0})).frobenius_norm() <= 1e-10);
  }
  SECTION("colliding images merge eigenprojections") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({-1.0, 1.0}));
    SpectralReport rep = spectral_report(c, parse_expr("z1^2", 1));
    REQUIRE(rep.spectrum.size() == 1);
    REQUIRE(contains(rep.spectrum, 1.0));
    REQUIRE((*rep.projection_at(1.0) - ComplexMatrix::identity(2))
                .frobenius_norm() <= 1e-10);
  }
  SECTION("constant functions have singleton spectrum") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    SpectralReport rep = spectral_report(c, parse_expr("3+2i", 1));
    REQUIRE(rep.spectrum.size() == 1);
    REQUIRE(contains(rep.spectrum, cplx(3.0, 2.0)));
    REQUIRE((*rep.projection_at(cplx(3.0, 2.0)) - ComplexMatrix::identity(2))
                .frobenius_norm() <= 1e-10);
  }
  SECTION("point spectrum is the spectrum and projections resolve identity") {
    std::mt19937_64 rng(12);
    BorelCalculus c = calculus_from_normal(testgen::random_normal(6, rng));
    SpectralReport rep = spectral_report(c, parse_expr("abs(z1)", 1));
    REQUIRE(rep.point_spectrum.size() == rep.spectrum.size());
    ComplexMatrix sum = ComplexMatrix::zero(6);
    for (const auto& [v, p] : rep.eigenprojections) sum += p;
    REQUIRE((sum - ComplexMatrix::identity(6)).frobenius_norm() <= 1e-9);
  }
}

TEST_CASE("spectrum equals the eigenvalues of the applied operator") {
  std::mt19937_64 rng(314);
  for (int iter = 0; iter < 10; ++iter) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 5);
    BorelCalculus c = calculus_from_normal(testgen::random_normal(n, rng));
    FuncExpr f = sample_smooth_expr(rng, 1, 3);
    auto claimed = essential_range(c, f);
    // independent oracle: eigenvalues of the assembled matrix
    EigResult eig = normal_eigendecompose(apply_fn(c, f));
    for (const cplx& lam : eig.eigenvalues) {
      double best = 1e300;
      for (const cplx& s : claimed) best = std::min(best, std::abs(s - lam));
      REQUIRE(best <= 1e-7 * std::max(1.0, std::abs(lam)));
    }
    for (const cplx& s : claimed) {
      double best = 1e300;
      for (const cplx& lam : eig.eigenvalues)
        best = std::min(best, std::abs(s - lam));
      REQUIRE(best <= 1e-7 * std::max(1.0, std::abs(s)));
    }
  }
}

TEST_CASE("operator_norm_via_calculus") {
  SECTION("diagonal examples") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, -2.0}));
    REQUIRE(operator_norm_via_calculus(c, parse_expr("z1", 1)) ==
            Catch::Approx(2.0));
    REQUIRE(operator_norm_via_calculus(c, parse_expr("0", 1)) == 0.0);
  }
  SECTION("coupled symmetric matrix") {
    BorelCalculus c = calculus_from_normal(mat2(2, 1, 1, 2));
    REQUIRE(operator_norm_via_calculus(c, parse_expr("z1", 1)) ==
            Catch::Approx(3.0).margin(1e-9));
  }
}

TEST_CASE("multiplication_representation") {
  SECTION("chosen cyclic vector spanning the whole space") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0}));
    const double s = 1.0 / std::sqrt(2.0);
    auto dec = multiplication_representation(c, {{cplx(s, 0), cplx(s, 0)}});
    REQUIRE(dec.blocks.size() == 1);
    REQUIRE(dec.blocks[0].weights.size() == 2);
    REQUIRE(dec.blocks[0].weights[0] == Catch::Approx(0.5));
    REQUIRE(dec.blocks[0].weights[1] == Catch::Approx(0.5));
  }
  SECTION("identity operator forces one block per dimension") {
    BorelCalculus c = calculus_from_normal(ComplexMatrix::identity(2));
    auto dec = multiplication_representation(c);
    REQUIRE(dec.blocks.size() == 2);
    for (const auto& b : dec.blocks) REQUIRE(b.weights.size() == 1);
  }
  SECTION("uniform cyclic vector on three distinct eigenvalues") {
    BorelCalculus c =
        calculus_from_normal(ComplexMatrix::diagonal({1.0, 2.0, 3.0}));
    const double s = 1.0 / std::sqrt(3.0);
    auto dec = multiplication_representation(
        c, {{cplx(s, 0), cplx(s, 0), cplx(s, 0)}});
    REQUIRE(dec.blocks.size() == 1);
    REQUIRE(dec.blocks[0].weights.size() == 3);
    for (double w : dec.blocks[0].weights) REQUIRE(w == Catch::Approx(1.0 / 3.0));
  }
  SECTION("unitary conjugation matches the multiplier on sampled functions") {
    std::mt19937_64 rng(2718);
    for (int iter = 0; iter < 8; ++iter) {
      const std::size_t n = 2 + static_cast<std::size_t>(rng() % 5);
      // repeated eigenvalues force several cyclic blocks
      std::vector<cplx> diag(n);
      for (std::size_t k = 0; k < n; ++k)
        diag[k] = static_cast<double>(k % ((n + 1) / 2));
      ComplexMatrix u = testgen::random_unitary(n, rng);
      BorelCalculus c = calculus_from_normal(testgen::conjugate_by(u, diag));
      auto dec = multiplication_representation(c);
      REQUIRE((dec.unitary.adjoint() * dec.unitary -
               ComplexMatrix::identity(n))
                  .frobenius_norm() <= 1e-9);
      std::size_t total = 0;
      for (const auto& b : dec.blocks) total += b.weights.size();
      REQUIRE(total == n);
      for (int s = 0; s < 20; ++s) {
        FuncExpr f = s % 5 == 0
                         ? FuncExpr::indicator(sample_borel_set(rng, 1, 2))
                         : sample_smooth_expr(rng, 1, 3);
        REQUIRE(representation_defect(dec, c, f) <= 1e-8);
      }
      // every constructed weight is strictly positive
      for (const auto& b : dec.blocks)
        for (double w : b.weights) REQUIRE(w > 0.0);
    }
  }
}

TEST_CASE("essential range commutes with push-forward") {
  std::mt19937_64 rng(11);
  BorelCalculus c = calculus_from_normal(testgen::random_normal(5, rng));
  FuncExpr phi = parse_expr("abs(z1)", 1);
  FuncExpr f = parse_expr("z1^2+1", 1);
  BorelCalculus pushed = pushforward_calculus(c, phi);
  auto lhs = essential_range(pushed, f);
  auto rhs = essential_range(c, FuncExpr::compose(f, {phi}));
  REQUIRE(lhs.size() == rhs.size());
  for (const cplx& v : lhs) REQUIRE(contains(rhs, v, 1e-12));
}
