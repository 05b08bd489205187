#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loopforms/superpoly.hpp"
#include "loopforms/supermatrix.hpp"
#include "test_util.hpp"

using namespace loopforms;
using testutil::Rng;

namespace {

ContextPtr mixed_ctx() {
  return Context::make({{"x", Parity::Even, std::nullopt, false},
                        {"y", Parity::Even, std::nullopt, false},
                        {"xi1", Parity::Odd, std::nullopt, false},
                        {"xi2", Parity::Odd, std::nullopt, false}});
}

SuperPoly var(const ContextPtr& c, const char* n, int e = 1) {
  return SuperPoly::variable(c, n, e);
}

}  // namespace

TEST_CASE("normalize_monomial Koszul signs") {
  auto ctx = mixed_ctx();
  VarId x = ctx->require("x"), xi1 = ctx->require("xi1"), xi2 = ctx->require("xi2");

  std::vector<std::pair<VarId, int>> f1 = {{xi2, 1}, {xi1, 1}};
  auto [s1, m1] = normalize_monomial(*ctx, f1);
  CHECK(s1 == -1);
  CHECK(m1.exp(xi1) == 1);
  CHECK(m1.exp(xi2) == 1);

  std::vector<std::pair<VarId, int>> f2 = {{xi1, 1}, {xi1, 1}};
  CHECK(normalize_monomial(*ctx, f2).first == 0);

  std::vector<std::pair<VarId, int>> f3 = {{x, 1}, {xi2, 1}, {xi1, 1}, {x, 1}};
  auto [s3, m3] = normalize_monomial(*ctx, f3);
  auto [os, om] = testutil::bubble_sign_oracle(*ctx, f3);
  CHECK(s3 == os);
  CHECK(m3 == om);
  CHECK(s3 == -1);
  CHECK(m3.exp(x) == 2);

  // randomized agreement with the bubble-sort oracle
  Rng rng(20240811);
  for (int it = 0; it < 200; ++it) {
    std::vector<std::pair<VarId, int>> fs;
    int len = rng.uniform(0, 6);
    for (int i = 0; i < len; ++i) fs.push_back({rng.uniform(0, ctx->size() - 1), rng.uniform(1, 2)});
    auto got = normalize_monomial(*ctx, fs);
    auto want = testutil::bubble_sign_oracle(*ctx, fs);
    CHECK(got.first == want.first);
    if (got.first != 0) CHECK(got.second == want.second);
  }
}

TEST_CASE("mul follows the sign rule") {
  auto ctx = mixed_ctx();
  SuperPoly xi1 = var(ctx, "xi1"), xi2 = var(ctx, "xi2"), x = var(ctx, "x");

  CHECK((xi1 * xi2).to_string() == "xi1*xi2");
  CHECK((xi2 * xi1) == -(xi1 * xi2));

  SuperPoly p = x + xi1 * xi2;
  SuperPoly sq = p * p;
  CHECK(sq == x * x + rat(2) * x * xi1 * xi2);

  auto capped = Context::make({{"a", Parity::Even, 3, false}});
  SuperPoly a = SuperPoly::variable(capped, "a");
  CHECK((a * a * a).is_zero());
  CHECK_FALSE((a * a).is_zero());
}

TEST_CASE("mul is associative and super-commutative") {
  auto ctx = mixed_ctx();
  Rng rng(1);
  for (int it = 0; it < 200; ++it) {
    SuperPoly p = rng.poly(ctx, 4, 3), q = rng.poly(ctx, 4, 3), r = rng.poly(ctx, 4, 3);
    CHECK((p * q) * r == p * (q * r));
  }
  for (int it = 0; it < 200; ++it) {
    Parity pp = it % 2 ? Parity::Odd : Parity::Even;
    Parity qp = (it / 2) % 2 ? Parity::Odd : Parity::Even;
    SuperPoly p = rng.poly_of_parity(ctx, pp, 4, 3), q = rng.poly_of_parity(ctx, qp, 4, 3);
    int s = (pp == Parity::Odd && qp == Parity::Odd) ? -1 : 1;
    CHECK(p * q == Rat(s) * (q * p));
  }
}

TEST_CASE("derivations satisfy the graded Leibniz rule") {
  auto ctx = mixed_ctx();
  VarId x = ctx->require("x"), xi1 = ctx->require("xi1");

  // d/dx on x^3
  Derivation ddx(ctx, Parity::Even, {{x, SuperPoly::constant(ctx, 1)}});
  CHECK(ddx(var(ctx, "x", 3)) == rat(3) * var(ctx, "x", 2));

  // D = xi1 d/dx on x xi1: D(x) xi1 + x D(xi1) = xi1^2 = 0
  Derivation D(ctx, Parity::Odd, {{x, var(ctx, "xi1")}});
  CHECK(D(var(ctx, "x") * var(ctx, "xi1")).is_zero());

  // Theta = xi1 d/dxi1 fixes x^2 xi1
  Derivation Theta(ctx, Parity::Even, {{xi1, var(ctx, "xi1")}});
  CHECK(Theta(var(ctx, "x", 2) * var(ctx, "xi1")) == var(ctx, "x", 2) * var(ctx, "xi1"));

  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    Parity dp = it % 2 ? Parity::Odd : Parity::Even;
    std::map<VarId, SuperPoly> imgs;
    for (VarId v = 0; v < ctx->size(); ++v)
      imgs.emplace(v, rng.poly_of_parity(ctx, ctx->parity(v) + dp, 3, 2));
    Derivation delta(ctx, dp, std::move(imgs));
    Parity pp = rng.uniform(0, 1) ? Parity::Odd : Parity::Even;
    SuperPoly p = rng.poly_of_parity(ctx, pp, 3, 3), q = rng.poly(ctx, 3, 3);
    int s = (dp == Parity::Odd && pp == Parity::Odd) ? -1 : 1;
    CHECK(delta(p * q) == delta(p) * q + Rat(s) * (p * delta(q)));
  }
}

TEST_CASE("commutators of derivations are derivations and satisfy Jacobi") {
  auto ctx = mixed_ctx();
  Rng rng(99);
  auto random_derivation = [&](Parity dp) {
    std::map<VarId, SuperPoly> imgs;
    for (VarId v = 0; v < ctx->size(); ++v)
      imgs.emplace(v, rng.poly_of_parity(ctx, ctx->parity(v) + dp, 2, 2));
    return Derivation(ctx, dp, std::move(imgs));
  };
  for (int it = 0; it < 40; ++it) {
    Parity pa = it % 2 ? Parity::Odd : Parity::Even;
    Parity pb = (it / 2) % 2 ? Parity::Odd : Parity::Even;
    Parity pc = (it / 4) % 2 ? Parity::Odd : Parity::Even;
    Derivation A = random_derivation(pa), B = random_derivation(pb), C = random_derivation(pc);

    // bracket acts as a derivation (Leibniz on a random product)
    Derivation AB = Derivation::bracket(A, B);
    SuperPoly p = rng.poly_of_parity(ctx, Parity::Even, 2, 2), q = rng.poly(ctx, 2, 2);
    CHECK(AB(p * q) == AB(p) * q + p * AB(q));

    // graded Jacobi: [A,[B,C]] = [[A,B],C] + (-1)^{|A||B|}[B,[A,C]]
    Derivation lhs = Derivation::bracket(A, Derivation::bracket(B, C));
    Derivation rhs1 = Derivation::bracket(Derivation::bracket(A, B), C);
    Derivation rhs2 = Derivation::bracket(B, Derivation::bracket(A, C));
    int s = (pa == Parity::Odd && pb == Parity::Odd) ? -1 : 1;
    for (VarId v = 0; v < ctx->size(); ++v)
      CHECK(lhs.image(v) == rhs1.image(v) + Rat(s) * rhs2.image(v));
  }
}

TEST_CASE("substitute is a parity-checked ring homomorphism") {
  auto ctx = mixed_ctx();
  auto with_h = Context::make({{"x", Parity::Even, std::nullopt, false},
                               {"y", Parity::Even, std::nullopt, false},
                               {"h", Parity::Even, std::nullopt, false},
                               {"xi1", Parity::Odd, std::nullopt, false},
                               {"xi2", Parity::Odd, std::nullopt, false}});
  VarId x = ctx->require("x");

  // x -> x + h in x^2
  SuperPoly img = SuperPoly::variable(with_h, "x") + SuperPoly::variable(with_h, "h");
  SuperPoly out = var(ctx, "x", 2).substitute({{x, img}}, with_h);
  SuperPoly expect = SuperPoly::variable(with_h, "x", 2) +
                     rat(2) * SuperPoly::variable(with_h, "x") * SuperPoly::variable(with_h, "h") +
                     SuperPoly::variable(with_h, "h", 2);
  CHECK(out == expect);

  // xi1 <-> xi2 swap picks up the Koszul sign
  VarId xi1 = ctx->require("xi1"), xi2 = ctx->require("xi2");
  SuperPoly swapped = (var(ctx, "xi1") * var(ctx, "xi2"))
                          .substitute({{xi1, var(ctx, "xi2")}, {xi2, var(ctx, "xi1")}}, ctx);
  CHECK(swapped == -(var(ctx, "xi1") * var(ctx, "xi2")));

  // x -> 0 in x + xi1
  SuperPoly killed = (var(ctx, "x") + var(ctx, "xi1")).substitute({{x, SuperPoly::zero(ctx)}}, ctx);
  CHECK(killed == var(ctx, "xi1"));

  // parity-violating image rejected
  CHECK_THROWS_AS(var(ctx, "x").substitute({{x, var(ctx, "xi1")}}, ctx), AlgebraError);

  // composition law: substitute(substitute(p, sigma), tau) = substitute(p, tau o sigma)
  Rng rng(123);
  for (int it = 0; it < 50; ++it) {
    std::map<VarId, SuperPoly> sigma, tau;
    for (VarId v = 0; v < ctx->size(); ++v) {
      sigma.emplace(v, rng.poly_of_parity(ctx, ctx->parity(v), 2, 2));
      tau.emplace(v, rng.poly_of_parity(ctx, ctx->parity(v), 2, 2));
    }
    SuperPoly p = rng.poly(ctx, 3, 3);
    SuperPoly two_step = p.substitute(sigma, ctx).substitute(tau, ctx);
    std::map<VarId, SuperPoly> comp;
    for (auto& [v, s] : sigma) comp.emplace(v, s.substitute(tau, ctx));
    CHECK(two_step == p.substitute(comp, ctx));
  }
}

TEST_CASE("invert_unit inverts exactly") {
  auto ctx = mixed_ctx();
  SuperPoly u = SuperPoly::constant(ctx, 1) + var(ctx, "xi1") * var(ctx, "xi2");
  CHECK(u.invert_unit() == SuperPoly::constant(ctx, 1) - var(ctx, "xi1") * var(ctx, "xi2"));

  auto capped = Context::make({{"a", Parity::Even, 3, false}});
  SuperPoly p = SuperPoly::constant(capped, 2) + SuperPoly::variable(capped, "a");
  SuperPoly q = p.invert_unit();
  SuperPoly expect = SuperPoly::constant(capped, rat(1, 2)) -
                     SuperPoly::variable(capped, "a") * rat(1, 4) +
                     SuperPoly::variable(capped, "a", 2) * rat(1, 8);
  CHECK(q == expect);
  CHECK(p * q == SuperPoly::constant(capped, 1));

  CHECK_THROWS_AS(var(ctx, "xi1").invert_unit(), AlgebraError);
  CHECK_THROWS_AS(var(ctx, "x").invert_unit(), AlgebraError);  // x is not nilpotent

  Rng rng(5);
  auto nil_ctx = Context::make({{"a", Parity::Even, 3, false},
                                {"b", Parity::Even, 4, false},
                                {"th1", Parity::Odd, std::nullopt, false},
                                {"th2", Parity::Odd, std::nullopt, false}});
  for (int it = 0; it < 100; ++it) {
    SuperPoly n = rng.poly_of_parity(nil_ctx, Parity::Even, 3, 3).without_scalar_part();
    SuperPoly unit = SuperPoly::constant(nil_ctx, rng.nonzero_rational()) + n;
    CHECK(unit * unit.invert_unit() == SuperPoly::constant(nil_ctx, 1));
  }
}

namespace {

SuperMatrix random_12_matrix(const ContextPtr& ctx, Rng& rng) {
  // format 1|2 with entries over a 6-generator odd context
  SuperMatrix g(ctx, 1, 2);
  // keep the scalar part of D triangular so det(D) stays invertible,
  // also after taking products of two such matrices
  auto even_entry = [&](bool unit) {
    SuperPoly p = rng.poly_of_parity(ctx, Parity::Even, 4, 3).without_scalar_part();
    if (!unit) return p;
    return SuperPoly::constant(ctx, rng.nonzero_rational()) + p;
  };
  auto odd_entry = [&] { return rng.poly_of_parity(ctx, Parity::Odd, 3, 2); };
  g.set(0, 0, even_entry(true));
  for (int j = 1; j < 3; ++j) {
    g.set(0, j, odd_entry());
    g.set(j, 0, odd_entry());
  }
  for (int i = 1; i < 3; ++i)
    for (int j = 1; j < 3; ++j) g.set(i, j, i == j ? even_entry(true) : even_entry(false));
  return g;
}

}  // namespace

TEST_CASE("berezinian values and multiplicativity") {
  auto odd6 = Context::make({{"b1", Parity::Odd, std::nullopt, false},
                             {"b2", Parity::Odd, std::nullopt, false},
                             {"b3", Parity::Odd, std::nullopt, false},
                             {"b4", Parity::Odd, std::nullopt, false},
                             {"b5", Parity::Odd, std::nullopt, false},
                             {"b6", Parity::Odd, std::nullopt, false}});

  CHECK(berezinian(SuperMatrix::identity(odd6, 1, 2)) == SuperPoly::constant(odd6, 1));
  CHECK(berezinian(SuperMatrix::identity(odd6, 2, 1)) == SuperPoly::constant(odd6, 1));

  {  // format 1|1: A=(2), B=(beta), C=(gamma), D=(1) -> 2 - beta gamma
    SuperMatrix g(odd6, 1, 1);
    g.set(0, 0, SuperPoly::constant(odd6, 2));
    g.set(0, 1, SuperPoly::variable(odd6, "b1"));
    g.set(1, 0, SuperPoly::variable(odd6, "b2"));
    g.set(1, 1, SuperPoly::constant(odd6, 1));
    CHECK(berezinian(g) == SuperPoly::constant(odd6, 2) -
                               SuperPoly::variable(odd6, "b1") * SuperPoly::variable(odd6, "b2"));
  }

  Rng rng(20240601);
  for (int it = 0; it < 50; ++it) {
    SuperMatrix g = random_12_matrix(odd6, rng);
    SuperMatrix h = random_12_matrix(odd6, rng);
    CHECK(berezinian(g * h) == berezinian(g) * berezinian(h));
  }
}

TEST_CASE("deterministic serialization") {
  auto ctx = mixed_ctx();
  SuperPoly p = rat(3, 2) * var(ctx, "x", 2) - var(ctx, "xi1") * var(ctx, "xi2") +
                SuperPoly::constant(ctx, rat(-1, 3));
  CHECK(p.to_string() == "-1/3 + 3/2*x^2 - xi1*xi2");
  CHECK(SuperPoly::zero(ctx).to_string() == "0");
}
