#include "loopforms/forms.hpp"

namespace loopforms {

std::shared_ptr<const FormContext> FormContext::make(std::vector<VarSpec> base,
                                                     int even_twin_cap) {
  auto fc = std::make_shared<FormContext>();
  fc->n_base_ = static_cast<int>(base.size());
  std::vector<VarSpec> all = base;
  for (const VarSpec& b : base) {
    VarSpec tw;
    tw.name = "d" + b.name;
    tw.parity = b.parity + Parity::Odd;
    if (tw.parity == Parity::Even && even_twin_cap > 0) tw.nil_cap = even_twin_cap;
    all.push_back(std::move(tw));
  }
  fc->ctx_ = Context::make(std::move(all));

  std::map<VarId, SuperPoly> d_img, iota_img;
  for (int i = 0; i < fc->n_base_; ++i) {
    d_img.emplace(i, SuperPoly::variable(fc->ctx_, fc->n_base_ + i));
    iota_img.emplace(fc->n_base_ + i, SuperPoly::variable(fc->ctx_, i));
  }
  fc->d_ = std::make_shared<Derivation>(fc->ctx_, Parity::Odd, std::move(d_img));
  fc->iota_ = std::make_shared<Derivation>(fc->ctx_, Parity::Odd, std::move(iota_img));
  return fc;
}

VarId FormContext::twin(VarId v) const {
  if (is_twin(v)) throw ContextError("twin of a twin variable");
  return v + n_base_;
}

VarId FormContext::base_of(VarId v) const {
  if (!is_twin(v)) throw ContextError("base_of: not a twin variable");
  return v - n_base_;
}

int FormContext::form_degree(const Monomial& m) const {
  int d = 0;
  for (VarId v = n_base_; v < ctx_->size(); ++v) d += m.exp(v);
  return d;
}

DifferentialForm de_rham_d(const DifferentialForm& w) { return {w.fc, w.fc->d()(w.poly)}; }

bool is_closed(const DifferentialForm& w) { return de_rham_d(w).is_zero(); }

std::map<int, DifferentialForm> form_degree_parts(const DifferentialForm& w) {
  std::map<int, DifferentialForm> parts;
  for (auto& [k, p] : w.poly.split_by([&](const Monomial& m) { return w.fc->form_degree(m); }))
    parts.emplace(k, DifferentialForm{w.fc, std::move(p)});
  return parts;
}

DifferentialForm euler_homotopy(const DifferentialForm& w) {
  const auto& fc = *w.fc;
  SuperPoly out(fc.ctx());
  for (const auto& [m, c] : w.poly.terms()) {
    int weight = fc.euler_weight(m);
    if (weight == 0) {
      if (fc.form_degree(m) != 0)
        throw AlgebraError("euler_homotopy: weight-zero monomial of positive form degree");
      continue;  // constants are annihilated
    }
    SuperPoly term = fc.euler_contraction()(SuperPoly::monomial(fc.ctx(), m, c));
    out += term * Rat(Rat(1) / weight);
  }
  return {w.fc, out};
}

DifferentialForm poincare_homotopy(const DifferentialForm& w) {
  if (w.is_zero()) return w;
  for (const auto& [m, c] : w.poly.terms()) {
    if (w.fc->euler_weight(m) == 0)
      throw AlgebraError("poincare_homotopy: weight-zero component has no primitive");
    if (w.fc->form_degree(m) < 1) throw AlgebraError("poincare_homotopy: form degree must be >= 1");
  }
  if (!is_closed(w)) throw AlgebraError("poincare_homotopy: form is not closed");
  DifferentialForm eta = euler_homotopy(w);
  if (!(de_rham_d(eta) == w))
    throw AlgebraError("poincare_homotopy: primitive check d(eta) = omega failed");
  return eta;
}

}  // namespace loopforms
