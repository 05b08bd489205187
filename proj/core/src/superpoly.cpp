#include "loopforms/superpoly.hpp"

#include <algorithm>
#include <sstream>

namespace loopforms {

bool Monomial::is_one() const {
  return std::all_of(exps_.begin(), exps_.end(), [](int e) { return e == 0; });
}

Parity Monomial::parity(const Context& ctx) const {
  int odd = 0;
  for (VarId v = 0; v < nvars(); ++v)
    if (ctx.parity(v) == Parity::Odd) odd += exp(v);
  return (odd & 1) ? Parity::Odd : Parity::Even;
}

std::pair<int, Monomial> normalize_monomial(const Context& ctx,
                                            std::span<const std::pair<VarId, int>> factors) {
  Monomial m(ctx.size());
  // Koszul sign = parity of the number of inversions among the odd factors
  // in input order; even factors commute freely.
  std::vector<VarId> odd_seq;
  for (auto [v, e] : factors) {
    if (v < 0 || v >= ctx.size()) throw ContextError("normalize_monomial: variable out of range");
    if (e == 0) continue;
    if (e < 0 && !ctx.is_laurent(v))
      throw AlgebraError("negative exponent on non-laurent variable " + ctx.var(v).name);
    if (ctx.parity(v) == Parity::Odd) {
      if (e > 1) return {0, Monomial(ctx.size())};
      odd_seq.push_back(v);
    }
    m.set_exp(v, m.exp(v) + e);
  }
  for (VarId v = 0; v < ctx.size(); ++v) {
    int cap = ctx.effective_cap(v);
    if (cap > 0 && m.exp(v) >= cap) return {0, Monomial(ctx.size())};
  }
  long inversions = 0;
  for (size_t i = 0; i < odd_seq.size(); ++i)
    for (size_t j = i + 1; j < odd_seq.size(); ++j) {
      if (odd_seq[i] == odd_seq[j]) return {0, Monomial(ctx.size())};
      if (odd_seq[i] > odd_seq[j]) ++inversions;
    }
  return {(inversions & 1) ? -1 : 1, m};
}

std::pair<int, Monomial> merge_monomials(const Context& ctx, const Monomial& a, const Monomial& b) {
  Monomial m(ctx.size());
  long crossings = 0;
  // odd factors of b jump over the odd factors of a with larger sort key
  for (VarId v = 0; v < ctx.size(); ++v) {
    int e = a.exp(v) + b.exp(v);
    if (ctx.parity(v) == Parity::Odd) {
      if (e > 1) return {0, Monomial(ctx.size())};
      if (b.exp(v)) {
        for (VarId w = v + 1; w < ctx.size(); ++w)
          if (ctx.parity(w) == Parity::Odd && a.exp(w)) ++crossings;
      }
    } else {
      int cap = ctx.effective_cap(v);
      if (cap > 0 && e >= cap) return {0, Monomial(ctx.size())};
    }
    m.set_exp(v, e);
  }
  return {(crossings & 1) ? -1 : 1, m};
}

SuperPoly SuperPoly::constant(ContextPtr ctx, const Rat& c) {
  SuperPoly p(std::move(ctx));
  if (c != 0) p.terms_.emplace(Monomial(p.ctx_->size()), c);
  return p;
}

SuperPoly SuperPoly::variable(ContextPtr ctx, VarId v, int power) {
  std::pair<VarId, int> f{v, power};
  auto [sign, m] = normalize_monomial(*ctx, std::span(&f, 1));
  SuperPoly p(std::move(ctx));
  if (sign != 0) p.terms_.emplace(m, Rat(sign));
  return p;
}

SuperPoly SuperPoly::variable(ContextPtr ctx, std::string_view name, int power) {
  VarId v = ctx->require(name);
  return variable(std::move(ctx), v, power);
}

SuperPoly SuperPoly::monomial(ContextPtr ctx, Monomial m, const Rat& c) {
  SuperPoly p(std::move(ctx));
  if (c != 0) p.terms_.emplace(std::move(m), c);
  return p;
}

std::optional<Parity> SuperPoly::parity() const {
  std::optional<Parity> p;
  for (const auto& [m, c] : terms_) {
    Parity mp = m.parity(*ctx_);
    if (!p)
      p = mp;
    else if (*p != mp)
      return std::nullopt;
  }
  return p ? p : std::optional<Parity>(Parity::Even);
}

Rat SuperPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rat(0) : it->second;
}

Rat SuperPoly::scalar_part() const {
  if (!ctx_) return 0;
  return coefficient(Monomial(ctx_->size()));
}

SuperPoly SuperPoly::without_scalar_part() const {
  SuperPoly r = *this;
  r.terms_.erase(Monomial(ctx_->size()));
  return r;
}

void SuperPoly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

SuperPoly SuperPoly::operator-() const {
  SuperPoly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

SuperPoly& SuperPoly::operator+=(const SuperPoly& o) {
  require_same_context(ctx_, o.ctx_, "add");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

SuperPoly& SuperPoly::operator-=(const SuperPoly& o) {
  require_same_context(ctx_, o.ctx_, "sub");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

SuperPoly& SuperPoly::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

bool SuperPoly::operator==(const SuperPoly& o) const {
  return same_context(ctx_, o.ctx_) && terms_ == o.terms_;
}

SuperPoly SuperPoly::mul(const SuperPoly& a, const SuperPoly& b) {
  require_same_context(a.ctx_, b.ctx_, "mul");
  SuperPoly r(a.ctx_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      auto [sign, m] = merge_monomials(*a.ctx_, ma, mb);
      if (sign == 0) continue;
      r.add_term(m, ca * cb * sign);
    }
  return r;
}

SuperPoly SuperPoly::pow(int e) const {
  if (e < 0) throw AlgebraError("pow: negative exponent");
  SuperPoly r = constant(ctx_, 1);
  SuperPoly b = *this;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

SuperPoly SuperPoly::parity_twisted() const {
  SuperPoly r(ctx_);
  for (const auto& [m, c] : terms_)
    r.terms_.emplace(m, m.parity(*ctx_) == Parity::Odd ? -c : c);
  return r;
}

SuperPoly SuperPoly::substitute(const std::map<VarId, SuperPoly>& images,
                                const ContextPtr& target) const {
  for (const auto& [v, img] : images) {
    if (!same_context(img.context(), target))
      throw ContextError("substitute: image not in target context");
    if (img.is_zero()) continue;
    auto p = img.parity();
    if (!p) throw AlgebraError("substitute: image of " + ctx_->var(v).name + " is not homogeneous");
    if (*p != ctx_->parity(v))
      throw AlgebraError("substitute: parity-violating image for " + ctx_->var(v).name);
  }
  SuperPoly result(target);
  for (const auto& [m, c] : terms_) {
    SuperPoly term = SuperPoly::constant(target, c);
    // canonical factor order: evens first, so no sign is lost up front
    for (VarId v : ctx_->canonical_order()) {
      int e = m.exp(v);
      if (e == 0) continue;
      auto it = images.find(v);
      if (it != images.end()) {
        if (e < 0) throw AlgebraError("substitute: negative power of substituted variable");
        term = SuperPoly::mul(term, it->second.pow(e));
      } else {
        VarId tv = target->require(ctx_->var(v).name);
        if (target->parity(tv) != ctx_->parity(v))
          throw AlgebraError("substitute: parity mismatch transporting " + ctx_->var(v).name);
        term = SuperPoly::mul(term, SuperPoly::variable(target, tv, e));
      }
      if (term.is_zero()) break;
    }
    result += term;
  }
  return result;
}

SuperPoly SuperPoly::invert_unit() const {
  Rat c = scalar_part();
  if (c == 0) throw AlgebraError("invert_unit: zero scalar part");
  SuperPoly n = without_scalar_part();
  for (const auto& [m, coeff] : n.terms_) {
    bool nil = false;
    for (VarId v = 0; v < ctx_->size(); ++v)
      if (m.exp(v) != 0 && ctx_->effective_cap(v) > 0) {
        nil = true;
        break;
      }
    if (!nil)
      throw AlgebraError("invert_unit: non-nilpotent part " + monomial_to_string(*ctx_, m));
  }
  // geometric series 1/(c+n) = c^{-1} sum (-n/c)^k, terminating by nilpotency
  int bound = ctx_->nilpotent_degree_bound();
  Rat cinv = Rat(1) / c;
  SuperPoly u = n * (-cinv);
  SuperPoly acc = SuperPoly::constant(ctx_, 1);
  SuperPoly powk = SuperPoly::constant(ctx_, 1);
  for (int k = 1; k <= bound; ++k) {
    powk = mul(powk, u);
    if (powk.is_zero()) break;
    acc += powk;
  }
  return acc * cinv;
}

SuperPoly SuperPoly::coefficient_of_right(const Monomial& marker) const {
  SuperPoly r(ctx_);
  for (const auto& [m, c] : terms_) {
    bool match = true;
    Monomial rest = m;
    for (VarId v = 0; v < ctx_->size(); ++v) {
      int me = marker.exp(v);
      if (me == 0) continue;
      if (m.exp(v) != me) {
        match = false;
        break;
      }
      rest.set_exp(v, 0);
    }
    if (!match) continue;
    // sign moving the marker factors to the right of the remaining ones:
    // rest * marker = sign * canonical(m)
    auto [sign, merged] = merge_monomials(*ctx_, rest, marker);
    if (sign == 0) continue;  // cannot happen for exact exponent match
    r.add_term(rest, c * sign);
  }
  return r;
}

std::map<int, SuperPoly> SuperPoly::split_by(const std::function<int(const Monomial&)>& key) const {
  std::map<int, SuperPoly> parts;
  for (const auto& [m, c] : terms_) {
    int k = key(m);
    auto it = parts.find(k);
    if (it == parts.end()) it = parts.emplace(k, SuperPoly(ctx_)).first;
    it->second.add_term(m, c);
  }
  return parts;
}

std::string monomial_to_string(const Context& ctx, const Monomial& m) {
  std::ostringstream os;
  bool first = true;
  for (VarId v : ctx.canonical_order()) {
    int e = m.exp(v);
    if (e == 0) continue;
    if (!first) os << "*";
    os << ctx.var(v).name;
    if (e != 1) os << "^" << e;
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

std::string SuperPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat a = c;
    if (first) {
      if (sgn(a) < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (sgn(a) < 0 ? " - " : " + ");
      if (sgn(a) < 0) a = -a;
    }
    if (m.is_one())
      os << rat_to_string(a);
    else if (a == 1)
      os << monomial_to_string(*ctx_, m);
    else
      os << rat_to_string(a) << "*" << monomial_to_string(*ctx_, m);
    first = false;
  }
  return os.str();
}

Derivation::Derivation(ContextPtr ctx, Parity parity, std::map<VarId, SuperPoly> images)
    : ctx_(std::move(ctx)), parity_(parity) {
  images_.resize(static_cast<size_t>(ctx_->size()), SuperPoly::zero(ctx_));
  for (auto& [v, img] : images) {
    require_same_context(ctx_, img.context(), "derivation image");
    if (!img.is_zero()) {
      auto p = img.parity();
      if (!p || *p != ctx_->parity(v) + parity_)
        throw AlgebraError("derivation image of " + ctx_->var(v).name +
                           " violates the parity rule");
    }
    images_[static_cast<size_t>(v)] = std::move(img);
  }
}

const SuperPoly& Derivation::image(VarId v) const { return images_.at(static_cast<size_t>(v)); }

SuperPoly Derivation::operator()(const SuperPoly& p) const {
  require_same_context(ctx_, p.context(), "apply_derivation");
  SuperPoly result(ctx_);
  for (const auto& [m, c] : p.terms()) {
    // factor the canonical monomial and apply Leibniz slot by slot
    int prefix_odd = 0;
    for (size_t pos = 0; pos < ctx_->canonical_order().size(); ++pos) {
      VarId v = ctx_->canonical_order()[pos];
      int e = m.exp(v);
      if (e == 0) continue;
      const SuperPoly& dv = images_[static_cast<size_t>(v)];
      if (!dv.is_zero()) {
        // d(v^e) = e v^{e-1} d(v); for odd v necessarily e = 1
        Monomial prefix(ctx_->size()), suffix(ctx_->size());
        for (size_t q = 0; q < pos; ++q) {
          VarId w = ctx_->canonical_order()[q];
          prefix.set_exp(w, m.exp(w));
        }
        prefix.set_exp(v, e - 1);  // even v commutes with everything
        for (size_t q = pos + 1; q < ctx_->canonical_order().size(); ++q) {
          VarId w = ctx_->canonical_order()[q];
          suffix.set_exp(w, m.exp(w));
        }
        int sign = (parity_bit(parity_) && (prefix_odd & 1)) ? -1 : 1;
        SuperPoly term = SuperPoly::monomial(ctx_, prefix, c * e * sign);
        term = SuperPoly::mul(term, dv);
        term = SuperPoly::mul(term, SuperPoly::monomial(ctx_, suffix, Rat(1)));
        result += term;
      }
      if (ctx_->parity(v) == Parity::Odd) prefix_odd += e;
    }
  }
  return result;
}

Derivation Derivation::bracket(const Derivation& a, const Derivation& b) {
  require_same_context(a.ctx_, b.ctx_, "bracket");
  int sign = (parity_bit(a.parity_) && parity_bit(b.parity_)) ? -1 : 1;
  std::map<VarId, SuperPoly> images;
  for (VarId v = 0; v < a.ctx_->size(); ++v) {
    SuperPoly img = a(b.image(v)) - Rat(sign) * b(a.image(v));
    if (!img.is_zero()) images.emplace(v, std::move(img));
  }
  return Derivation(a.ctx_, a.parity_ + b.parity_, std::move(images));
}

Derivation Derivation::scaled(const Rat& c) const {
  std::map<VarId, SuperPoly> images;
  for (VarId v = 0; v < ctx_->size(); ++v)
    if (!images_[static_cast<size_t>(v)].is_zero())
      images.emplace(v, images_[static_cast<size_t>(v)] * c);
  return Derivation(ctx_, parity_, std::move(images));
}

Derivation Derivation::sum(const Derivation& a, const Derivation& b) {
  require_same_context(a.ctx_, b.ctx_, "derivation sum");
  if (a.parity_ != b.parity_) throw AlgebraError("derivation sum: parity mismatch");
  std::map<VarId, SuperPoly> images;
  for (VarId v = 0; v < a.ctx_->size(); ++v) {
    SuperPoly img = a.image(v) + b.image(v);
    if (!img.is_zero()) images.emplace(v, std::move(img));
  }
  return Derivation(a.ctx_, a.parity_, std::move(images));
}

}  // namespace loopforms
