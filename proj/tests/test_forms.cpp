#include <doctest.h>

#include "loopforms/forms.hpp"
#include "test_util.hpp"

using namespace loopforms;
using testutil::Rng;

namespace {

FormContextPtr plane() {
  return FormContext::make({{"x1", Parity::Even, std::nullopt, false},
                            {"x2", Parity::Even, std::nullopt, false}});
}

FormContextPtr superplane() {  // A^{2|1}, even twin of xi capped at 6
  return FormContext::make({{"x1", Parity::Even, std::nullopt, false},
                            {"x2", Parity::Even, std::nullopt, false},
                            {"xi", Parity::Odd, std::nullopt, false}},
                           6);
}

DifferentialForm fvar(const FormContextPtr& fc, const char* n, int e = 1) {
  return {fc, SuperPoly::variable(fc->ctx(), n, e)};
}

DifferentialForm rand_form(Rng& rng, const FormContextPtr& fc, int max_deg, int terms) {
  return {fc, rng.poly(fc->ctx(), max_deg, terms)};
}

}  // namespace

TEST_CASE("de_rham_d basics") {
  auto fc = plane();
  CHECK(de_rham_d(fvar(fc, "x1")) == fvar(fc, "dx1"));

  // d(x1^3 x2^2 dx2) = 3 x1^2 x2^2 dx1 dx2
  DifferentialForm w = fvar(fc, "x1", 3) * fvar(fc, "x2", 2) * fvar(fc, "dx2");
  SuperPoly expect = rat(3) * fvar(fc, "x1", 2).poly * fvar(fc, "x2", 2).poly *
                     fvar(fc, "dx1").poly * fvar(fc, "dx2").poly;
  CHECK(de_rham_d(w).poly == expect);

  Rng rng(42);
  for (int it = 0; it < 100; ++it) {
    DifferentialForm p = rand_form(rng, fc, 4, 4);
    CHECK(de_rham_d(de_rham_d(p)).is_zero());
  }
  auto sfc = superplane();
  for (int it = 0; it < 100; ++it) {
    DifferentialForm p = rand_form(rng, sfc, 4, 4);
    CHECK(de_rham_d(de_rham_d(p)).is_zero());
  }
}

TEST_CASE("is_closed") {
  auto fc = plane();
  CHECK(is_closed(fvar(fc, "dx1") * fvar(fc, "dx2")));
  CHECK_FALSE(is_closed(fvar(fc, "x1") * fvar(fc, "dx2")));
  Rng rng(43);
  for (int it = 0; it < 50; ++it) CHECK(is_closed(de_rham_d(rand_form(rng, fc, 4, 3))));
}

TEST_CASE("form degree decomposition") {
  auto fc = plane();
  DifferentialForm w = fvar(fc, "x1") + fvar(fc, "x1") * fvar(fc, "dx2") +
                       fvar(fc, "dx1") * fvar(fc, "dx2");
  auto parts = form_degree_parts(w);
  REQUIRE(parts.size() == 3);
  CHECK(parts.at(0).poly == fvar(fc, "x1").poly);
  CHECK(parts.at(1).poly == (fvar(fc, "x1") * fvar(fc, "dx2")).poly);
  CHECK(parts.at(2).poly == (fvar(fc, "dx1") * fvar(fc, "dx2")).poly);
  SuperPoly sum(fc->ctx());
  for (auto& [d, part] : parts) sum += part.poly;
  CHECK(sum == w.poly);
}

TEST_CASE("poincare homotopy produces exact primitives") {
  auto fc = plane();

  // omega = dx1 dx2 -> (x1 dx2 - x2 dx1)/2
  DifferentialForm w = fvar(fc, "dx1") * fvar(fc, "dx2");
  DifferentialForm eta = poincare_homotopy(w);
  DifferentialForm expect = {
      fc, rat(1, 2) * (fvar(fc, "x1") * fvar(fc, "dx2")).poly -
              rat(1, 2) * (fvar(fc, "x2") * fvar(fc, "dx1")).poly};
  CHECK(eta == expect);
  CHECK(de_rham_d(eta) == w);

  // exactness round-trip
  DifferentialForm w2 = de_rham_d(fvar(fc, "x1", 3) * fvar(fc, "dx2"));
  CHECK(de_rham_d(poincare_homotopy(w2)) == w2);

  // closed 2x1 dx1 dx2
  DifferentialForm w3{fc, rat(2) * (fvar(fc, "x1") * fvar(fc, "dx1") * fvar(fc, "dx2")).poly};
  CHECK(de_rham_d(poincare_homotopy(w3)) == w3);

  // errors: not closed, and the weight-zero component
  CHECK_THROWS_AS(poincare_homotopy(fvar(fc, "x1") * fvar(fc, "dx2")), AlgebraError);

  Rng rng(44);
  auto sfc = superplane();
  for (int it = 0; it < 60; ++it) {
    DifferentialForm g = rand_form(rng, sfc, 3, 3);
    DifferentialForm w4 = de_rham_d(g);
    if (w4.is_zero()) continue;
    CHECK(de_rham_d(poincare_homotopy(w4)) == w4);
  }
}

TEST_CASE("homotopy identity d h + h d = id on positive weight") {
  Rng rng(45);
  for (auto fc : {plane(), superplane()}) {
    for (int it = 0; it < 120; ++it) {
      DifferentialForm p = rand_form(rng, fc, 4, 4);
      // drop the weight-zero (constant) part
      SuperPoly pos(fc->ctx());
      for (const auto& [m, c] : p.poly.terms())
        if (fc->euler_weight(m) > 0) pos.add_term(m, c);
      DifferentialForm f{fc, pos};
      DifferentialForm lhs = de_rham_d(euler_homotopy(f)) + euler_homotopy(de_rham_d(f));
      CHECK(lhs == f);
    }
  }
}

TEST_CASE("three-form expansion matches the cyclic sum") {
  // coefficient of dx_i dx_j dx_k in d(sum_{j<k} w_jk dx_j dx_k) equals
  // dw_jk/dx_i + dw_ki/dx_j + dw_ij/dx_k with w antisymmetrized, sign +1
  auto fc = FormContext::make({{"x1", Parity::Even, std::nullopt, false},
                               {"x2", Parity::Even, std::nullopt, false},
                               {"x3", Parity::Even, std::nullopt, false}});
  Rng rng(46);
  const int n = 3;
  for (int it = 0; it < 30; ++it) {
    // random even-coefficient antisymmetric w
    std::map<std::pair<int, int>, SuperPoly> w;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        SuperPoly c(fc->ctx());
        SuperPoly sample = rng.poly(fc->ctx(), 3, 3);
        for (const auto& [m, coef] : sample.terms()) {
          bool base_only = true;
          for (VarId v = n; v < fc->ctx()->size(); ++v)
            if (m.exp(v)) base_only = false;
          if (base_only) c.add_term(m, coef);
        }
        w[{j, k}] = c;
        w[{k, j}] = -c;
      }
    auto wat = [&](int j, int k) {
      if (j == k) return SuperPoly::zero(fc->ctx());
      return w.at({j, k});
    };

    DifferentialForm omega{fc, SuperPoly::zero(fc->ctx())};
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        omega.poly += wat(j, k) * SuperPoly::variable(fc->ctx(), n + j) *
                      SuperPoly::variable(fc->ctx(), n + k);
    SuperPoly d_omega = de_rham_d(omega).poly;

    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Monomial marker(fc->ctx()->size());
          marker.set_exp(n + i, 1);
          marker.set_exp(n + j, 1);
          marker.set_exp(n + k, 1);
          SuperPoly got = d_omega.coefficient_of_right(marker);
          auto ddx = [&](const SuperPoly& p, int v) {
            Derivation d(fc->ctx(), Parity::Even, {{v, SuperPoly::constant(fc->ctx(), 1)}});
            return d(p);
          };
          SuperPoly want = ddx(wat(j, k), i) + ddx(wat(k, i), j) + ddx(wat(i, j), k);
          CHECK(got == want);
        }
  }
}
