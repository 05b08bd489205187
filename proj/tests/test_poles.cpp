#include <doctest.h>

#include "loopforms/poles.hpp"
#include "test_util.hpp"

using namespace loopforms;
using testutil::Rng;

namespace {

FormContextPtr plane() {
  return FormContext::make({{"x1", Parity::Even, std::nullopt, false},
                            {"x2", Parity::Even, std::nullopt, false}});
}

DifferentialForm fvar(const FormContextPtr& fc, const char* n, int e = 1) {
  return {fc, SuperPoly::variable(fc->ctx(), n, e)};
}

// parameter context with residue variables of cap d and the invertible lambda
FormContextPtr param_ctx(int groups, int d) {
  std::vector<VarSpec> vars;
  const char* names[] = {"a", "b", "c"};
  for (int g = 0; g < groups; ++g)
    for (int k = 1; k <= 2; ++k)
      vars.push_back({std::string(names[g]) + std::to_string(k), Parity::Even, d, false});
  vars.push_back({"lam", Parity::Even, std::nullopt, true});
  return FormContext::make(std::move(vars), 0);
}

// gamma = a/t + b/(lam - t)
PoleFamily two_pole(const FormContextPtr& base, const FormContextPtr& value) {
  const ContextPtr& v = value->ctx();
  PoleFamily fam;
  fam.base_fc = base;
  fam.value_fc = value;
  Pole p0;
  p0.location = SuperPoly::zero(v);
  p0.orientation = 1;
  p0.residues = {SuperPoly::variable(v, "a1"), SuperPoly::variable(v, "a2")};
  Pole p1;
  p1.location = SuperPoly::variable(v, "lam");
  p1.orientation = -1;  // b/(lam - t)
  p1.residues = {SuperPoly::variable(v, "b1"), SuperPoly::variable(v, "b2")};
  fam.poles = {p0, p1};
  return fam;
}

// delta = a/t + b/(lam - t) + c/(lam + t)
PoleFamily three_pole(const FormContextPtr& base, const FormContextPtr& value) {
  PoleFamily fam = two_pole(base, value);
  Pole p2;
  p2.location = -SuperPoly::variable(value->ctx(), "lam");
  p2.orientation = 1;  // c/(t + lam)
  p2.residues = {SuperPoly::variable(value->ctx(), "c1"),
                 SuperPoly::variable(value->ctx(), "c2")};
  fam.poles.push_back(p2);
  return fam;
}

}  // namespace

TEST_CASE("rational loop expansions at each pole") {
  auto base = plane();
  auto value = param_ctx(2, 3);
  const ContextPtr& v = value->ctx();
  PoleFamily fam = two_pole(base, value);
  auto lam = [&](int e) { return SuperPoly::variable(v, "lam", e); };

  {  // near t = 0:  a t^{-1} + (b/lam) + (b/lam^2) t + (b/lam^3) t^2
    LoopPoint g = expand_rational_loop(fam, 0, 2);
    const NilLaurent& x1 = g.coords[0];
    CHECK(x1.coefficient(-1) == SuperPoly::variable(v, "a1"));
    CHECK(x1.coefficient(0) == SuperPoly::variable(v, "b1") * lam(-1));
    CHECK(x1.coefficient(1) == SuperPoly::variable(v, "b1") * lam(-2));
    CHECK(x1.coefficient(2) == SuperPoly::variable(v, "b1") * lam(-3));
    CHECK(x1.valid_to() == 2);
  }
  {  // near t = lam in s = lam - t:  b s^{-1} + (a/lam) + (a/lam^2) s + ...
    LoopPoint g = expand_rational_loop(fam, 1, 2);
    const NilLaurent& x2 = g.coords[1];
    CHECK(x2.coefficient(-1) == SuperPoly::variable(v, "b2"));
    CHECK(x2.coefficient(0) == SuperPoly::variable(v, "a2") * lam(-1));
    CHECK(x2.coefficient(1) == SuperPoly::variable(v, "a2") * lam(-2));
    CHECK(x2.coefficient(2) == SuperPoly::variable(v, "a2") * lam(-3));
  }

  auto value3 = param_ctx(3, 3);
  const ContextPtr& v3 = value3->ctx();
  PoleFamily fam3 = three_pole(base, value3);
  {  // near t = -lam in u = t + lam:  c u^{-1} + ((-a + b/2)/lam) u^0 + ...
    LoopPoint g = expand_rational_loop(fam3, 2, 1);
    const NilLaurent& x1 = g.coords[0];
    CHECK(x1.coefficient(-1) == SuperPoly::variable(v3, "c1"));
    SuperPoly lam_inv = SuperPoly::variable(v3, "lam", -1);
    SuperPoly expect0 = (-SuperPoly::variable(v3, "a1") +
                         SuperPoly::variable(v3, "b1") * rat(1, 2)) *
                        lam_inv;
    CHECK(x1.coefficient(0) == expect0);
  }

  // a coincident configuration is rejected
  PoleFamily bad = two_pole(base, value);
  bad.poles[1].location = SuperPoly::zero(v);
  CHECK_THROWS_AS(expand_rational_loop(bad, 0, 1), AlgebraError);
}

TEST_CASE("additivity: the per-pole sum is regular at lambda = 0") {
  auto base = plane();
  auto value = param_ctx(2, 3);
  PoleFamily fam = two_pole(base, value);

  {  // eta = x1 dx2
    LoopEvaluator f = LoopEvaluator::transgression(fvar(base, "x1") * fvar(base, "dx2"));
    AdditivityReport rep = additivity_check(f, fam);
    CHECK(rep.regular);
    CHECK(rep.lambda_negative.empty());
  }

  // all monomial 1-forms of degree <= 3, two poles and three poles
  auto value3 = param_ctx(3, 3);
  PoleFamily fam3 = three_pole(base, value3);
  for (int e1 = 0; e1 <= 2; ++e1)
    for (int e2 = 0; e2 + e1 <= 2; ++e2)
      for (const char* dv : {"dx1", "dx2"}) {
        DifferentialForm eta =
            DifferentialForm{base, SuperPoly::variable(base->ctx(), "x1", e1) *
                                       SuperPoly::variable(base->ctx(), "x2", e2) *
                                       SuperPoly::variable(base->ctx(), dv)};
        LoopEvaluator f = LoopEvaluator::transgression(eta);
        CHECK(additivity_check(f, fam).regular);
        CHECK(additivity_check(f, fam3).regular);
      }
}

TEST_CASE("single-pole lambda expansion matches the taylor profile") {
  // the lambda^{-2} part of f at the pole-0 expansion is
  // sum_ij omega_{ij}(0) a_i b_j; regularity of the two-pole sum is then
  // the super skew-symmetry of omega
  auto base = plane();
  auto value = param_ctx(2, 3);
  const ContextPtr& v = value->ctx();
  DifferentialForm eta = fvar(base, "x1", 2) * fvar(base, "dx2");
  LoopEvaluator f = LoopEvaluator::transgression(eta);

  LoopPoint g0 = expand_rational_loop(two_pole(base, value), 0, 4);
  SuperPoly val = f(g0);
  SuperPoly lam2(v);
  for (const auto& [m, c] : val.terms())
    if (m.exp(v->require("lam")) == -2) lam2.add_term(m, c);

  TaylorProfile prof = taylor_profile(f, 3);
  // evaluate omega_{ij} at the origin and pair with a_i b_j / lam^2
  SuperPoly expect(v);
  for (const auto& [ij, w] : prof.omega) {
    Rat w0 = w.scalar_part();
    if (w0 == 0) continue;
    SuperPoly ai = SuperPoly::variable(v, std::string("a") + std::to_string(ij.first + 1));
    SuperPoly bj = SuperPoly::variable(v, std::string("b") + std::to_string(ij.second + 1));
    expect += ai * bj * SuperPoly::variable(v, "lam", -2) * w0;
  }
  CHECK(lam2 == expect);
}

TEST_CASE("degenerate pole families") {
  auto base = plane();
  // coefficients x_{-2}, x_{-1}, x_0, x_1 per coordinate, nilpotent negatives
  std::vector<VarSpec> vars;
  for (int k = 1; k <= 2; ++k) {
    vars.push_back({"um2_" + std::to_string(k), Parity::Even, 3, false});
    vars.push_back({"um1_" + std::to_string(k), Parity::Even, 3, false});
    vars.push_back({"u0_" + std::to_string(k), Parity::Even, std::nullopt, false});
    vars.push_back({"up1_" + std::to_string(k), Parity::Even, std::nullopt, false});
  }
  vars.push_back({"lam", Parity::Even, std::nullopt, true});
  auto value = FormContext::make(std::move(vars), 0);
  const ContextPtr& v = value->ctx();
  VarId lam = v->require("lam");

  std::map<std::pair<int, int>, SuperPoly> coeffs;
  for (int k = 0; k < 2; ++k) {
    coeffs[{k, -2}] = SuperPoly::variable(v, "um2_" + std::to_string(k + 1));
    coeffs[{k, -1}] = SuperPoly::variable(v, "um1_" + std::to_string(k + 1));
    coeffs[{k, 0}] = SuperPoly::variable(v, "u0_" + std::to_string(k + 1));
    coeffs[{k, 1}] = SuperPoly::variable(v, "up1_" + std::to_string(k + 1));
  }
  DegeneratePoleFamily fam = degenerate_pole_family(base, value, lam, coeffs, 2);
  REQUIRE(fam.family.poles.size() == 2);

  {  // partial fractions: x_{-2}/(t(t+lam)) = (x_{-2}/lam)(1/t - 1/(t+lam))
    SuperPoly um2 = coeffs.at({0, -2});
    SuperPoly li = SuperPoly::variable(v, "lam", -1);
    CHECK(fam.family.poles[0].residues[0] ==
          coeffs.at({0, -1}) + um2 * li);
    CHECK(fam.family.poles[1].residues[0] == -(um2 * li));
    CHECK(fam.family.poles[1].location == -SuperPoly::variable(v, "lam"));
  }

  {  // oracle: the pole-0 expansion agrees with the direct series of
    // x_{-2}/(t(t+lam)) + x_{-1}/t + x_0 + x_1 t
    LoopPoint g = expand_rational_loop(fam.family, 0, 3);
    NilLaurent direct(v);
    // 1/(t(t+lam)) = sum_{m>=0} (-1)^m lam^{-(m+1)} t^{m-1}
    for (int m = 0; m <= 4; ++m)
      direct.add_term(m - 1, SuperPoly::variable(v, "lam", -(m + 1)) * Rat(m % 2 ? -1 : 1));
    direct = direct.truncated(3);
    NilLaurent expect = direct * coeffs.at({0, -2});
    expect.add_term(-1, coeffs.at({0, -1}));
    expect.add_term(0, coeffs.at({0, 0}));
    expect.add_term(1, coeffs.at({0, 1}));
    for (int n = -2; n <= 3; ++n) CHECK(g.coords[0].coefficient(n) == expect.coefficient(n));
  }

  {  // additive values: polynomial in lambda, specializing at 0 to the
    // direct evaluation on the degenerate loop
    for (const DifferentialForm& omega :
         {fvar(base, "dx1") * fvar(base, "dx2"),
          de_rham_d(fvar(base, "x1", 2) * fvar(base, "dx2"))}) {
      LoopEvaluator f = LoopEvaluator::radon(omega);
      SuperPoly family_val = family_value(f, fam.family);
      SuperPoly at_zero = specialize_lambda_to_zero(family_val, lam);  // checks regularity
      CHECK(at_zero == f(fam.original));
    }
  }
}
