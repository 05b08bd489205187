#include "loopforms/poles.hpp"

namespace loopforms {

void PoleFamily::validate() const {
  const int nb = base_fc->n_base();
  for (const Pole& p : poles) {
    if (p.orientation != 1 && p.orientation != -1)
      throw AlgebraError("pole orientation must be +1 or -1");
    if (static_cast<int>(p.residues.size()) != nb)
      throw AlgebraError("pole residue vector must cover every coordinate");
    for (int b = 0; b < nb; ++b) {
      const SuperPoly& r = p.residues[static_cast<size_t>(b)];
      if (r.is_zero()) continue;
      if (!is_nilpotent(r)) throw AlgebraError("pole residues must be nilpotent");
      if (!r.is_homogeneous(base_fc->ctx()->parity(b)))
        throw AlgebraError("pole residue parity mismatch");
    }
  }
  for (size_t a = 0; a < poles.size(); ++a)
    for (size_t b = a + 1; b < poles.size(); ++b)
      if (poles[a].location == poles[b].location)
        throw AlgebraError("pole locations must be pairwise distinct");
  if (static_cast<int>(tail.size()) > 0 && static_cast<int>(tail.size()) != nb)
    throw AlgebraError("tail must cover every coordinate when present");
  for (const NilLaurent& t : tail) {
    if (!t.is_exact()) throw AlgebraError("tail must be an exact polynomial");
    if (!t.terms().empty() && t.terms().begin()->first < 0)
      throw AlgebraError("tail must be regular at t = 0");
  }
}

SuperPoly invert_simple(const SuperPoly& p) {
  if (p.term_count() != 1) throw AlgebraError("cannot invert: not a single Laurent monomial");
  const auto& [m, c] = *p.terms().begin();
  const Context& ctx = *p.context();
  Monomial inv(ctx.size());
  for (VarId v = 0; v < ctx.size(); ++v) {
    if (m.exp(v) == 0) continue;
    if (!ctx.is_laurent(v))
      throw AlgebraError("cannot invert: variable " + ctx.var(v).name + " is not invertible");
    inv.set_exp(v, -m.exp(v));
  }
  return SuperPoly::monomial(p.context(), inv, Rat(1) / c);
}

LoopPoint expand_rational_loop(const PoleFamily& family, size_t pole, int K) {
  family.validate();
  if (pole >= family.poles.size()) throw AlgebraError("pole index out of range");
  const Pole& at = family.poles[pole];
  const ContextPtr& vctx = family.value_fc->ctx();
  const int nb = family.base_fc->n_base();

  LoopPoint out;
  out.base_fc = family.base_fc;
  out.value_fc = family.value_fc;
  out.coords.assign(static_cast<size_t>(nb), NilLaurent(vctx));

  // own pole: residue * s^{-1}
  for (int b = 0; b < nb; ++b)
    out.coords[static_cast<size_t>(b)].add_term(-1, at.residues[static_cast<size_t>(b)]);

  // other poles: r / (o' (Delta + o s)), Delta = loc_p - loc_q invertible
  for (size_t q = 0; q < family.poles.size(); ++q) {
    if (q == pole) continue;
    const Pole& other = family.poles[q];
    SuperPoly delta = at.location - other.location;
    SuperPoly dinv = invert_simple(delta);
    // 1/(Delta + o s) = Delta^{-1} sum_m (-o Delta^{-1} s)^m
    SuperPoly geom = dinv;
    for (int m = 0; m <= K; ++m) {
      SuperPoly coeff = geom * Rat(other.orientation);  // 1/o' = o'
      for (int b = 0; b < nb; ++b) {
        const SuperPoly& r = other.residues[static_cast<size_t>(b)];
        if (!r.is_zero()) out.coords[static_cast<size_t>(b)].add_term(m, r * coeff);
      }
      geom = geom * dinv * Rat(-at.orientation);
    }
  }

  // regular tail evaluated at t = loc + o s
  if (!family.tail.empty()) {
    // powers of (loc + o s) up to the needed t-degree, truncated at s^K
    int tmax = 0;
    for (const NilLaurent& t : family.tail)
      if (!t.terms().empty()) tmax = std::max(tmax, t.terms().rbegin()->first);
    std::vector<NilLaurent> tp;  // tp[e] = (loc + o s)^e
    NilLaurent one(vctx);
    one.add_term(0, SuperPoly::constant(vctx, 1));
    tp.push_back(one);
    NilLaurent lin(vctx);
    lin.add_term(0, at.location);
    lin.add_term(1, SuperPoly::constant(vctx, Rat(at.orientation)));
    for (int e = 1; e <= tmax; ++e) tp.push_back((tp.back() * lin).truncated(K));
    for (int b = 0; b < nb && b < static_cast<int>(family.tail.size()); ++b)
      for (const auto& [e, c] : family.tail[static_cast<size_t>(b)].terms())
        out.coords[static_cast<size_t>(b)] =
            out.coords[static_cast<size_t>(b)] + tp[static_cast<size_t>(e)] * c;
  }

  for (auto& c : out.coords) c = c.truncated(K);
  out.validate();
  return out;
}

SuperPoly family_value(const LoopEvaluator& f, const PoleFamily& family) {
  const ContextPtr& vctx = family.value_fc->ctx();
  int K = f.max_degree() + 2;
  for (int attempt = 0; attempt < 8; ++attempt, K += 2) {
    try {
      SuperPoly total = SuperPoly::zero(vctx);
      for (size_t p = 0; p < family.poles.size(); ++p)
        total += f(expand_rational_loop(family, p, K));
      return total;
    } catch (const WindowError&) {
      continue;
    }
  }
  throw WindowError("family_value: expansion order insufficient even after retries");
}

AdditivityReport additivity_check(const LoopEvaluator& f, const PoleFamily& family) {
  AdditivityReport rep;
  rep.value = family_value(f, family);

  VarId lambda = -1;
  const Context& ctx = *family.value_fc->ctx();
  for (VarId v = 0; v < ctx.size(); ++v)
    if (ctx.is_laurent(v)) {
      lambda = v;
      break;
    }
  if (lambda < 0) throw AlgebraError("additivity_check: no lambda variable in the family context");

  for (auto& [e, part] : rep.value.split_by([&](const Monomial& m) { return m.exp(lambda); }))
    if (e < 0) rep.lambda_negative.emplace(e, std::move(part));
  rep.regular = rep.lambda_negative.empty();
  return rep;
}

SuperPoly specialize_lambda_to_zero(const SuperPoly& p, VarId lambda) {
  SuperPoly out(p.context());
  for (const auto& [m, c] : p.terms()) {
    int e = m.exp(lambda);
    if (e < 0) throw AlgebraError("specialize_lambda_to_zero: negative power of lambda");
    if (e == 0) out.add_term(m, c);
  }
  return out;
}

DegeneratePoleFamily degenerate_pole_family(
    const FormContextPtr& base_fc, const FormContextPtr& value_fc, VarId lambda,
    const std::map<std::pair<int, int>, SuperPoly>& coefficients, int M) {
  if (M < 2) throw AlgebraError("degenerate_pole_family: M >= 2");
  const ContextPtr& vctx = value_fc->ctx();
  if (!vctx->is_laurent(lambda))
    throw AlgebraError("degenerate_pole_family: lambda must be invertible");
  const int nb = base_fc->n_base();

  auto coeff = [&](int b, int n) -> SuperPoly {
    auto it = coefficients.find({b, n});
    return it == coefficients.end() ? SuperPoly::zero(vctx) : it->second;
  };
  int tail_max = 0;
  for (const auto& [key, c] : coefficients) tail_max = std::max(tail_max, key.second);

  DegeneratePoleFamily out;
  out.family.base_fc = base_fc;
  out.family.value_fc = value_fc;

  // poles at -q lambda, q = 0..M-1, with the partial-fraction residues
  // 1/(t (t+lambda) ... (t+(p-1)lambda)) =
  //   sum_q (-1)^q / (q! (p-1-q)! lambda^{p-1}) / (t + q lambda)
  for (int q = 0; q < M; ++q) {
    Pole pole;
    pole.location = SuperPoly::variable(vctx, lambda) * Rat(-q);
    pole.orientation = 1;
    for (int b = 0; b < nb; ++b) {
      SuperPoly r = q == 0 ? coeff(b, -1) : SuperPoly::zero(vctx);
      for (int p = std::max(2, q + 1); p <= M; ++p) {
        const SuperPoly& xc = coeff(b, -p);
        if (xc.is_zero()) continue;
        Rat fact = Rat((q % 2) ? -1 : 1);
        for (int a = 2; a <= q; ++a) fact /= a;
        for (int a = 2; a <= p - 1 - q; ++a) fact /= a;
        SuperPoly lam_pow = SuperPoly::variable(vctx, lambda, -(p - 1));
        r += xc * lam_pow * fact;
      }
      pole.residues.push_back(std::move(r));
    }
    out.family.poles.push_back(std::move(pole));
  }
  for (int b = 0; b < nb; ++b) {
    NilLaurent t(vctx);
    for (int n = 0; n <= tail_max; ++n) {
      SuperPoly c = coeff(b, n);
      if (!c.is_zero()) t.add_term(n, c);
    }
    out.family.tail.push_back(std::move(t));
  }
  out.family.validate();

  // the lambda = 0 specialization: the original loop with high-order poles
  out.original.base_fc = base_fc;
  out.original.value_fc = value_fc;
  for (int b = 0; b < nb; ++b) {
    NilLaurent s(vctx);
    for (int n = -M; n <= tail_max; ++n) {
      SuperPoly c = coeff(b, n);
      if (!c.is_zero()) s.add_term(n, c);
    }
    out.original.coords.push_back(std::move(s));
  }
  out.original.validate();
  return out;
}

}  // namespace loopforms
