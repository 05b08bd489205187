#include "loopforms/loops.hpp"

#include <array>

namespace loopforms {

bool is_nilpotent(const SuperPoly& p) {
  const Context& ctx = *p.context();
  for (const auto& [m, c] : p.terms()) {
    bool nil = false;
    for (VarId v = 0; v < ctx.size(); ++v)
      if (m.exp(v) != 0 && ctx.effective_cap(v) > 0) {
        nil = true;
        break;
      }
    if (!nil) return false;
  }
  return true;
}

void LoopPoint::validate() const {
  if (static_cast<int>(coords.size()) != base_fc->n_base())
    throw AlgebraError("loop point must assign every base coordinate");
  for (int i = 0; i < base_fc->n_base(); ++i) {
    Parity want = base_fc->ctx()->parity(i);
    for (const auto& [n, c] : coords[static_cast<size_t>(i)].terms()) {
      if (!c.is_homogeneous(want))
        throw AlgebraError("loop coefficient of t^" + std::to_string(n) + " for " +
                           base_fc->ctx()->var(i).name + " has the wrong parity");
      if (n < 0 && !is_nilpotent(c))
        throw AlgebraError("negative loop coefficient of " + base_fc->ctx()->var(i).name +
                           " is not nilpotent");
    }
  }
}

LoopContext LoopContext::make(const FormContextPtr& base_fc, int min_exp, int max_exp,
                              int neg_cap, std::vector<VarSpec> extra_params) {
  if (min_exp > 0 || max_exp < 0) throw AlgebraError("loop window must contain 0");
  if (neg_cap < 2) throw AlgebraError("negative coefficients need a cap >= 2");
  LoopContext lc;
  lc.base_fc_ = base_fc;
  lc.min_exp_ = min_exp;
  lc.max_exp_ = max_exp;

  std::vector<VarSpec> vars;
  std::vector<int> weights;
  for (int b = 0; b < base_fc->n_base(); ++b) {
    const VarSpec& bs = base_fc->ctx()->var(b);
    for (int n = min_exp; n <= max_exp; ++n) {
      VarSpec v;
      v.name = n == 0 ? bs.name : bs.name + "[" + std::to_string(n) + "]";
      v.parity = bs.parity;
      if (n < 0)
        v.nil_cap = bs.parity == Parity::Odd ? std::min(neg_cap, 2) : neg_cap;
      else if (n == 0)
        v.nil_cap = bs.nil_cap;
      lc.coeff_.emplace(std::make_pair(b, n), static_cast<VarId>(vars.size()));
      vars.push_back(std::move(v));
      weights.push_back(n);
    }
  }
  for (VarSpec& p : extra_params) {
    vars.push_back(p);
    weights.push_back(0);
  }
  lc.value_fc_ = FormContext::make(std::move(vars), 0);
  lc.weight_ = std::move(weights);
  return lc;
}

VarId LoopContext::coeff_var(int base_i, int n) const {
  auto it = coeff_.find({base_i, n});
  if (it == coeff_.end()) throw AlgebraError("loop coefficient outside the window");
  return it->second;
}

int LoopContext::rotation_weight(VarId v) const {
  int b = value_fc_->is_twin(v) ? value_fc_->base_of(v) : v;
  return weight_.at(static_cast<size_t>(b));
}

LoopPoint LoopContext::generic_point() const {
  LoopPoint g;
  g.base_fc = base_fc_;
  g.value_fc = value_fc_;
  // the generic point is an exact polynomial loop: evaluating on it means
  // restricting to loops supported on this window
  for (int b = 0; b < base_fc_->n_base(); ++b) {
    NilLaurent s(value_fc_->ctx());
    for (int n = min_exp_; n <= max_exp_; ++n)
      s.add_term(n, SuperPoly::variable(value_fc_->ctx(), coeff_var(b, n)));
    g.coords.push_back(std::move(s));
  }
  g.validate();
  return g;
}

LaurentForm ev_pullback(const DifferentialForm& eta, const LoopPoint& gamma) {
  if (eta.fc.get() != gamma.base_fc.get())
    throw ContextError("ev_pullback: form and loop live over different bases");
  const ContextPtr& vctx = gamma.value_fc->ctx();
  const int nb = gamma.base_fc->n_base();

  std::vector<LaurentForm> img;
  img.reserve(static_cast<size_t>(2 * nb));
  for (int v = 0; v < nb; ++v) img.push_back(LaurentForm::scalar(gamma.coords[static_cast<size_t>(v)]));
  for (int v = 0; v < nb; ++v) {
    const NilLaurent& xv = gamma.coords[static_cast<size_t>(v)];
    NilLaurent transverse(vctx);
    for (const auto& [n, c] : xv.terms()) transverse.add_term(n, gamma.value_fc->d()(c));
    transverse.set_valid_to(xv.valid_to());
    // dt (x_v)'(t) with dt moved to the rightmost slot
    int sign = gamma.base_fc->ctx()->parity(v) == Parity::Odd ? -1 : 1;
    img.push_back(LaurentForm{std::move(transverse), xv.ddt() * Rat(sign)});
  }

  NilLaurent zero(vctx);
  LaurentForm acc{zero, zero};
  for (const auto& [m, c] : eta.poly.terms()) {
    LaurentForm term = LaurentForm::scalar(NilLaurent::term(vctx, 0, SuperPoly::constant(vctx, c)));
    for (VarId v : eta.fc->ctx()->canonical_order())
      for (int rep = 0; rep < m.exp(v); ++rep) term = term * img[static_cast<size_t>(v)];
    acc = acc + term;
  }
  return acc;
}

SuperPoly residue(const LaurentForm& w) { return w.dt_coeff.coefficient(-1); }

SuperPoly transgress(const DifferentialForm& eta, const LoopPoint& gamma) {
  for (const auto& [m, c] : eta.poly.terms())
    if (eta.fc->form_degree(m) < 1)
      throw AlgebraError("transgress: form degree must be >= 1");
  return residue(ev_pullback(eta, gamma));
}

SuperPoly radon(const DifferentialForm& omega, const LoopPoint& gamma) {
  return transgress(poincare_homotopy(omega), gamma);
}

LoopEvaluator LoopEvaluator::transgression(DifferentialForm eta) {
  for (const auto& [m, c] : eta.poly.terms())
    if (eta.fc->form_degree(m) < 1)
      throw AlgebraError("loop evaluator needs a form of degree >= 1");
  return LoopEvaluator(std::move(eta));
}

LoopEvaluator LoopEvaluator::radon(DifferentialForm omega) {
  return LoopEvaluator(poincare_homotopy(omega));
}

SuperPoly LoopEvaluator::operator()(const LoopPoint& gamma) const {
  return transgress(eta_, gamma);
}

int LoopEvaluator::max_degree() const {
  int d = 0;
  for (const auto& [m, c] : eta_.poly.terms()) d = std::max(d, m.total_degree());
  return d;
}

namespace {

std::string fresh_name(const Context& ctx, std::string base) {
  while (ctx.find(base)) base += "_";
  return base;
}

}  // namespace

SuperPoly hessian_form(const LoopEvaluator& f, const std::optional<std::vector<Rat>>& point,
                       int n, int i, int j) {
  if (n == 0) throw AlgebraError("hessian_form: the pairing is defined for n != 0 only");
  const FormContextPtr& base_fc = f.base();
  const int nb = base_fc->n_base();
  if (i < 0 || i >= nb || j < 0 || j >= nb) throw AlgebraError("hessian_form: bad coordinate");

  std::vector<VarSpec> vars;
  for (int b = 0; b < nb; ++b) vars.push_back(base_fc->ctx()->var(b));
  VarSpec u, w;
  u.parity = base_fc->ctx()->parity(i);
  u.nil_cap = 2;
  w.parity = base_fc->ctx()->parity(j);
  w.nil_cap = 2;
  u.name = fresh_name(*base_fc->ctx(), "_u");
  w.name = fresh_name(*base_fc->ctx(), "_w");
  vars.push_back(u);
  vars.push_back(w);
  auto value_fc = FormContext::make(std::move(vars), 0);
  const ContextPtr& vctx = value_fc->ctx();

  LoopPoint gamma;
  gamma.base_fc = base_fc;
  gamma.value_fc = value_fc;
  for (int b = 0; b < nb; ++b) {
    NilLaurent s(vctx);
    if (point) {
      if (static_cast<int>(point->size()) != nb)
        throw AlgebraError("hessian_form: base point size mismatch");
      const Rat& val = (*point)[static_cast<size_t>(b)];
      if (base_fc->ctx()->parity(b) == Parity::Odd && val != 0)
        throw AlgebraError("hessian_form: odd coordinates take base value 0");
      s.add_term(0, SuperPoly::constant(vctx, val));
    } else {
      s.add_term(0, SuperPoly::variable(vctx, b));
    }
    if (b == i) s.add_term(-n, SuperPoly::variable(vctx, nb));
    if (b == j) s.add_term(n, SuperPoly::variable(vctx, nb + 1));
    gamma.coords.push_back(std::move(s));
  }
  gamma.validate();

  SuperPoly value = f(gamma);
  Monomial marker(vctx->size());
  marker.set_exp(nb, 1);
  marker.set_exp(nb + 1, 1);
  return value.coefficient_of_right(marker);
}

ScalingCheck psi_n_scaling_check(const LoopEvaluator& f, int n) {
  ScalingCheck check;
  check.n = n;
  const int nb = f.base()->n_base();
  for (int sign : {1, -1}) {
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) {
        SuperPoly wn = hessian_form(f, std::nullopt, sign * n, i, j);
        SuperPoly w1 = hessian_form(f, std::nullopt, sign, i, j);
        if (wn.to_string() != (w1 * Rat(n)).to_string()) {
          check.ok = false;
          check.mismatches.push_back("omega^" + std::to_string(sign * n) + "[" +
                                     std::to_string(i) + "," + std::to_string(j) + "]");
        }
      }
  }
  return check;
}

namespace {

// exact-match coefficient extraction: terms whose mode-variable part equals
// the marker contribute coefficient * (0-mode part), marker kept rightmost
SuperPoly pattern_coefficient(const SuperPoly& F, const Monomial& marker,
                              const std::function<bool(VarId)>& is_mode_var) {
  const Context& ctx = *F.context();
  SuperPoly out(F.context());
  for (const auto& [m, c] : F.terms()) {
    bool match = true;
    Monomial rest = m;
    for (VarId v = 0; v < ctx.size(); ++v) {
      if (is_mode_var(v)) {
        if (m.exp(v) != marker.exp(v)) {
          match = false;
          break;
        }
        rest.set_exp(v, 0);
      } else if (marker.exp(v) != 0) {
        throw AlgebraError("marker contains a non-mode variable");
      }
    }
    if (!match) continue;
    auto [sign, merged] = merge_monomials(ctx, rest, marker);
    if (sign == 0) continue;
    out.add_term(rest, c * sign);
  }
  return out;
}

}  // namespace

TaylorProfile taylor_profile(const LoopEvaluator& f, int d) {
  LoopContext lc = LoopContext::make(f.base(), -1, 2, d);
  const ContextPtr& vctx = lc.value()->ctx();
  const int nb = f.base()->n_base();

  SuperPoly F = f(lc.generic_point());

  TaylorProfile prof;
  prof.value_fc = lc.value();
  prof.higher = SuperPoly::zero(vctx);
  prof.failure_part = SuperPoly::zero(vctx);

  // quasihomogeneity of degree 0 under loop rotation
  for (const auto& [m, c] : F.terms()) {
    int qdeg = 0;
    for (VarId v = 0; v < vctx->size(); ++v) qdeg += m.exp(v) * lc.rotation_weight(v);
    if (qdeg != 0) prof.failure_part.add_term(m, c);
  }
  prof.quasihomogeneous = prof.failure_part.is_zero();

  auto is_mode = [&](VarId v) { return lc.rotation_weight(v) != 0; };
  auto xm = [&](int k) { return lc.coeff_var(k, -1); };
  auto xp = [&](int k) { return lc.coeff_var(k, 1); };
  auto xpp = [&](int k) { return lc.coeff_var(k, 2); };

  SuperPoly recon(vctx);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      Monomial marker(vctx->size());
      marker.set_exp(xm(i), 1);
      marker.set_exp(xp(j), 1);
      SuperPoly w = pattern_coefficient(F, marker, is_mode);
      if (!w.is_zero()) {
        prof.omega.emplace(std::make_pair(i, j), w);
        recon += w * SuperPoly::monomial(vctx, marker, Rat(1));
      }
    }
  for (int i = 0; i < nb; ++i)
    for (int j = i; j < nb; ++j)
      for (int k = 0; k < nb; ++k) {
        Monomial marker(vctx->size());
        marker.set_exp(xm(i), marker.exp(xm(i)) + 1);
        marker.set_exp(xm(j), marker.exp(xm(j)) + 1);
        if (vctx->parity(xm(i)) == Parity::Odd && i == j) continue;
        marker.set_exp(xpp(k), 1);
        SuperPoly p = pattern_coefficient(F, marker, is_mode);
        if (!p.is_zero()) {
          prof.psi.emplace(std::array<int, 3>{i, j, k}, p);
          recon += p * SuperPoly::monomial(vctx, marker, Rat(1));
        }
      }
  for (int i = 0; i < nb; ++i)
    for (int j = i; j < nb; ++j)
      for (int k = 0; k < nb; ++k)
        for (int l = k; l < nb; ++l) {
          Monomial marker(vctx->size());
          marker.set_exp(xm(i), marker.exp(xm(i)) + 1);
          marker.set_exp(xm(j), marker.exp(xm(j)) + 1);
          marker.set_exp(xp(k), marker.exp(xp(k)) + 1);
          marker.set_exp(xp(l), marker.exp(xp(l)) + 1);
          if ((i == j && vctx->parity(xm(i)) == Parity::Odd) ||
              (k == l && vctx->parity(xp(k)) == Parity::Odd))
            continue;
          SuperPoly p = pattern_coefficient(F, marker, is_mode);
          if (!p.is_zero()) {
            prof.phi.emplace(std::array<int, 4>{i, j, k, l}, p);
            recon += p * SuperPoly::monomial(vctx, marker, Rat(1));
          }
        }

  prof.higher = F - recon - prof.failure_part;
  // drop the recognized-pattern part; whatever remains is a higher pattern
  return prof;
}

}  // namespace loopforms
