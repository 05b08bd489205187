#include <doctest.h>

#include "loopforms/forms.hpp"
#include "loopforms/weil.hpp"
#include "test_util.hpp"

using namespace loopforms;
using testutil::Rng;

namespace {

ContextPtr base_xy() {
  return Context::make({{"x", Parity::Even, std::nullopt, false},
                        {"y", Parity::Even, std::nullopt, false}});
}

const AlgDerivation& find_der(const std::vector<AlgDerivation>& basis, const std::string& l) {
  for (const auto& d : basis)
    if (d.label == l) return d;
  throw std::runtime_error("no such derivation: " + l);
}

}  // namespace

TEST_CASE("local super-algebra validation") {
  auto o3 = LocalSuperAlgebra::truncated_polynomial(3);
  CHECK(o3.dim() == 3);
  CHECK(o3.c(1, 1, 2) == 1);
  CHECK(o3.c(1, 2, 0) == 0);

  auto ext2 = LocalSuperAlgebra::exterior(2);
  CHECK(ext2.dim() == 4);
  CHECK(ext2.parity(1) == Parity::Odd);
  CHECK(ext2.parity(3) == Parity::Even);
  // eta2 * eta1 = -eta1 eta2
  CHECK(ext2.c(2, 1, 3) == -1);

  // a non-nilpotent "local algebra" is rejected: e1 * e1 = e1
  std::vector<std::vector<std::vector<Rat>>> bad(
      2, std::vector(2, std::vector(2, Rat(0))));
  bad[0][0][0] = 1;
  bad[0][1][1] = 1;
  bad[1][0][1] = 1;
  bad[1][1][1] = 1;
  CHECK_THROWS_AS(
      LocalSuperAlgebra::from_table({"1", "e"}, {Parity::Even, Parity::Even}, bad),
      AlgebraError);
}

TEST_CASE("weil_expand reproduces the defining relations") {
  auto ext1 = LocalSuperAlgebra::exterior(1);
  auto wc = WeilContext::make(base_xy(), ext1);

  // constants sit in the e_0 slot
  auto comps = weil_expand(wc, SuperPoly::constant(wc->base(), 1));
  CHECK(comps[0] == SuperPoly::constant(wc->ctx(), 1));
  CHECK(comps[1].is_zero());

  // f = x y over Lambda[eta]: (xy)[1] = x[0] y[1] + x[1] y[0]
  auto base = wc->base();
  SuperPoly xy = SuperPoly::variable(base, "x") * SuperPoly::variable(base, "y");
  auto c2 = weil_expand(wc, xy);
  SuperPoly expect1 = SuperPoly::variable(wc->ctx(), "x[0]") * SuperPoly::variable(wc->ctx(), "y[1]") +
                      SuperPoly::variable(wc->ctx(), "x[1]") * SuperPoly::variable(wc->ctx(), "y[0]");
  CHECK(c2[1] == expect1);
  CHECK(c2[0] == SuperPoly::variable(wc->ctx(), "x[0]") * SuperPoly::variable(wc->ctx(), "y[0]"));

  // f = x^2 over Q[t]/t^3: components (x0^2, 2 x0 x1, x1^2 + 2 x0 x2)
  auto o3 = LocalSuperAlgebra::truncated_polynomial(3);
  auto base1 = Context::make({{"x", Parity::Even, std::nullopt, false}});
  auto wc3 = WeilContext::make(base1, o3);
  auto c3 = weil_expand(wc3, SuperPoly::variable(base1, "x", 2));
  auto v = [&](const char* n) { return SuperPoly::variable(wc3->ctx(), n); };
  CHECK(c3[0] == v("x[0]") * v("x[0]"));
  CHECK(c3[1] == rat(2) * v("x[0]") * v("x[1]"));
  CHECK(c3[2] == v("x[1]") * v("x[1]") + rat(2) * v("x[0]") * v("x[2]"));
}

TEST_CASE("weil_expand is multiplicative with structure-constant convolution") {
  Rng rng(321);
  auto base = Context::make({{"x", Parity::Even, std::nullopt, false},
                             {"y", Parity::Even, std::nullopt, false},
                             {"th", Parity::Odd, std::nullopt, false}});
  for (const auto& o : {LocalSuperAlgebra::exterior(2), LocalSuperAlgebra::truncated_polynomial(3)}) {
    auto wc = WeilContext::make(base, o);
    for (int it = 0; it < 40; ++it) {
      SuperPoly f = rng.poly(base, 3, 3), g = rng.poly(base, 3, 3);
      auto fc = weil_expand(wc, f);
      auto gc = weil_expand(wc, g);
      auto fgc = weil_expand(wc, f * g);
      for (int k = 0; k < o.dim(); ++k) {
        SuperPoly conv(wc->ctx());
        for (int i = 0; i < o.dim(); ++i)
          for (int j = 0; j < o.dim(); ++j) {
            if (o.c(i, j, k) == 0) continue;
            SuperPoly gj = gc[static_cast<size_t>(j)];
            if (o.parity(i) == Parity::Odd) gj = gj.parity_twisted();
            conv += fc[static_cast<size_t>(i)] * gj * o.c(i, j, k);
          }
        CHECK(fgc[static_cast<size_t>(k)] == conv);
      }
    }
  }
}

TEST_CASE("N=1 induced operators are the de Rham pair") {
  auto basis = der_o_basis(1);
  const auto& D = find_der(basis, "D");
  const auto& Theta = find_der(basis, "Theta");

  // mixed-parity base to pin the signs on both kinds of generators
  auto base = Context::make({{"x", Parity::Even, std::nullopt, false},
                             {"xi", Parity::Odd, std::nullopt, false}});
  auto wc = WeilContext::make(base, LocalSuperAlgebra::exterior(1));
  Derivation dD = induced_derivation(wc, D);
  Derivation dTheta = induced_derivation(wc, Theta);

  auto v = [&](const char* n) { return SuperPoly::variable(wc->ctx(), n); };
  CHECK(dD(v("x[0]")) == v("x[1]"));
  CHECK(dD(v("xi[0]")) == v("xi[1]"));
  CHECK(dD(v("x[1]")).is_zero());
  CHECK(dTheta(v("x[1]")) == v("x[1]"));
  CHECK(dTheta(v("x[0]")).is_zero());

  // Theta = xi d/dxi fixes x^2 xi modes; [Theta, D] = D on random polynomials
  Rng rng(17);
  Derivation br = Derivation::bracket(dTheta, dD);
  for (int it = 0; it < 50; ++it) {
    SuperPoly p = rng.poly(wc->ctx(), 4, 4);
    CHECK(br(p) == dD(p));
  }

  // intertwining with the de Rham differential: x[1] <-> dx
  auto fc = FormContext::make({{"x", Parity::Even, std::nullopt, false},
                               {"xi", Parity::Odd, std::nullopt, false}},
                              0);
  std::map<VarId, SuperPoly> to_forms;
  to_forms.emplace(wc->ctx()->require("x[0]"), SuperPoly::variable(fc->ctx(), "x"));
  to_forms.emplace(wc->ctx()->require("x[1]"), SuperPoly::variable(fc->ctx(), "dx"));
  to_forms.emplace(wc->ctx()->require("xi[0]"), SuperPoly::variable(fc->ctx(), "xi"));
  to_forms.emplace(wc->ctx()->require("xi[1]"), SuperPoly::variable(fc->ctx(), "dxi"));
  for (int it = 0; it < 50; ++it) {
    SuperPoly p = rng.poly(wc->ctx(), 3, 4);
    SuperPoly lhs = dD(p).substitute(to_forms, fc->ctx());
    SuperPoly rhs = fc->d()(p.substitute(to_forms, fc->ctx()));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("N=2 abstract bracket table") {
  auto o = LocalSuperAlgebra::exterior(2);
  auto basis = der_o_basis(2);
  auto match = [&](const AlgDerivation& got, const AlgDerivation& want) {
    return got.action == want.action;
  };
  const auto& D1 = find_der(basis, "D1");
  const auto& D2 = find_der(basis, "D2");
  const auto& D1s = find_der(basis, "D1*");
  const auto& D2s = find_der(basis, "D2*");
  const auto& T1 = find_der(basis, "Theta1");
  const auto& T2 = find_der(basis, "Theta2");

  CHECK(match(alg_bracket(o, D1, D1s), T2));
  CHECK(match(alg_bracket(o, D2, D2s), T1));
  CHECK(alg_bracket(o, D1, D2).action.is_zero());
  CHECK(alg_bracket(o, D1, D1).action.is_zero());
  CHECK(match(alg_bracket(o, T1, D1), D1));
  CHECK(match(alg_bracket(o, T2, D2), D2));
  CHECK(alg_bracket(o, T1, D2).action.is_zero());
  CHECK(match(alg_bracket(o, T1, D1s), AlgDerivation{"", Parity::Odd, D1s.action * Rat(-1)}));
}

TEST_CASE("sl(1|2) structure check") {
  Sl12Report rep = sl12_structure_check();
  CHECK(rep.even_count == 4);
  CHECK(rep.odd_count == 4);
  CHECK(rep.injective);
  CHECK(rep.all_supertraces_zero);
  CHECK(rep.closes);
  CHECK(rep.table.size() == 36);
  for (const auto& e : rep.table) {
    CHECK(e.abstract_ok);
    CHECK(e.matrix_ok);
    CHECK(e.induced_ok);
  }
  CHECK(rep.ok);
}
