#include "loopforms/weil.hpp"

namespace loopforms {

std::shared_ptr<const WeilContext> WeilContext::make(ContextPtr base, LocalSuperAlgebra o) {
  auto wc = std::make_shared<WeilContext>();
  std::vector<VarSpec> vars;
  for (VarId b = 0; b < base->size(); ++b) {
    const VarSpec& bs = base->var(b);
    if (bs.laurent) throw ContextError("laurent variable in a near-point base");
    for (int i = 0; i < o.dim(); ++i) {
      VarSpec v;
      v.name = bs.name + "[" + std::to_string(i) + "]";
      v.parity = bs.parity + o.parity(i);
      // x[0] inherits the cap of x; the higher modes stay free
      if (i == 0) v.nil_cap = bs.nil_cap;
      vars.push_back(std::move(v));
    }
  }
  wc->base_ = std::move(base);
  wc->o_ = std::move(o);
  wc->ctx_ = Context::make(std::move(vars));
  return wc;
}

VarId WeilContext::gen(VarId base_var, int i) const {
  if (base_var < 0 || base_var >= base_->size() || i < 0 || i >= o_.dim())
    throw ContextError("weil generator out of range");
  return base_var * o_.dim() + i;
}

SuperPoly WeilContext::embed(const SuperPoly& f) const {
  require_same_context(base_, f.context(), "weil embed");
  std::map<VarId, SuperPoly> images;
  for (VarId b = 0; b < base_->size(); ++b)
    images.emplace(b, SuperPoly::variable(ctx_, gen(b, 0)));
  return f.substitute(images, ctx_);
}

WeilTensor::WeilTensor(WeilContextPtr wc) : wc_(std::move(wc)) {
  comps_.assign(static_cast<size_t>(wc_->algebra().dim()), SuperPoly::zero(wc_->ctx()));
}

WeilTensor WeilTensor::scalar(WeilContextPtr wc, const SuperPoly& p) {
  WeilTensor t(std::move(wc));
  t.comps_[0] = p;
  return t;
}

WeilTensor& WeilTensor::operator+=(const WeilTensor& o) {
  for (size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
  return *this;
}

WeilTensor operator*(const WeilTensor& a, const WeilTensor& b) {
  const LocalSuperAlgebra& o = a.wc_->algebra();
  WeilTensor r(a.wc_);
  for (int i = 0; i < o.dim(); ++i) {
    if (a.comps_[static_cast<size_t>(i)].is_zero()) continue;
    for (int j = 0; j < o.dim(); ++j) {
      if (b.comps_[static_cast<size_t>(j)].is_zero()) continue;
      // (p ox e_i)(q ox e_j): e_i moves past q with a Koszul twist
      SuperPoly q = b.comps_[static_cast<size_t>(j)];
      if (o.parity(i) == Parity::Odd) q = q.parity_twisted();
      SuperPoly pq = a.comps_[static_cast<size_t>(i)] * q;
      for (int k = 0; k < o.dim(); ++k) {
        const Rat& ck = o.c(i, j, k);
        if (ck != 0) r.comps_[static_cast<size_t>(k)] += pq * ck;
      }
    }
  }
  return r;
}

std::vector<SuperPoly> weil_expand(const WeilContextPtr& wc, const SuperPoly& f) {
  require_same_context(wc->base(), f.context(), "weil_expand");
  const Context& base = *wc->base();
  const LocalSuperAlgebra& o = wc->algebra();

  std::vector<WeilTensor> gen_images;
  for (VarId b = 0; b < base.size(); ++b) {
    WeilTensor t(wc);
    for (int i = 0; i < o.dim(); ++i)
      t.component(i) = SuperPoly::variable(wc->ctx(), wc->gen(b, i));
    gen_images.push_back(std::move(t));
  }

  WeilTensor acc(wc);
  for (const auto& [m, coeff] : f.terms()) {
    WeilTensor term = WeilTensor::scalar(wc, SuperPoly::constant(wc->ctx(), coeff));
    for (VarId v : base.canonical_order()) {
      int e = m.exp(v);
      for (int rep = 0; rep < e; ++rep) term = term * gen_images[static_cast<size_t>(v)];
    }
    acc += term;
  }
  std::vector<SuperPoly> out;
  for (int i = 0; i < o.dim(); ++i) out.push_back(acc.component(i));
  return out;
}

Derivation induced_derivation(const WeilContextPtr& wc, const AlgDerivation& delta) {
  const LocalSuperAlgebra& o = wc->algebra();
  std::string why;
  if (!o.is_derivation(delta.action, delta.parity, &why))
    throw AlgebraError("induced_derivation(" + delta.label + "): " + why);

  std::map<VarId, SuperPoly> images;
  for (VarId b = 0; b < wc->base()->size(); ++b)
    for (int k = 0; k < o.dim(); ++k) {
      SuperPoly img(wc->ctx());
      for (int i = 0; i < o.dim(); ++i) {
        const Rat& dik = delta.action.at(k, i);  // e_k component of delta(e_i)
        if (dik == 0) continue;
        int sign = (parity_bit(delta.parity) && !parity_bit(o.parity(i))) ? -1 : 1;
        img += SuperPoly::variable(wc->ctx(), wc->gen(b, i)) * (dik * sign);
      }
      if (!img.is_zero()) images.emplace(wc->gen(b, k), std::move(img));
    }
  return Derivation(wc->ctx(), delta.parity, std::move(images));
}

namespace {

// expands delta in a list of independent derivations, exactly
std::optional<std::vector<Rat>> expand_in(const std::vector<AlgDerivation>& basis,
                                          const RatMatrix& target) {
  const int n = target.rows();
  RatMatrix sys(n * n, static_cast<int>(basis.size()));
  std::vector<Rat> rhs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int row = i * n + j;
      for (size_t b = 0; b < basis.size(); ++b) sys.at(row, static_cast<int>(b)) = basis[b].action.at(i, j);
      rhs.push_back(target.at(i, j));
    }
  return sys.solve(rhs);
}

}  // namespace

Sl12Report sl12_structure_check() {
  Sl12Report rep;
  LocalSuperAlgebra o = LocalSuperAlgebra::exterior(2);
  std::vector<AlgDerivation> basis = der_o_basis(2);

  for (const auto& d : basis) {
    rep.labels.push_back(d.label);
    rep.parities.push_back(d.parity);
    if (d.parity == Parity::Even)
      ++rep.even_count;
    else
      ++rep.odd_count;
  }

  // matrices on C^{1|2} = Lambda[eta1,eta2]/C.1, ordered eta1 eta2 | eta1, eta2.
  // Quotient indices: 3 (even) then 1, 2 (odd).
  const std::array<int, 3> q = {3, 1, 2};
  for (const auto& d : basis) {
    RatMatrix m(3, 3);
    for (int col = 0; col < 3; ++col)
      for (int row = 0; row < 3; ++row) m.at(row, col) = d.action.at(q[static_cast<size_t>(row)], q[static_cast<size_t>(col)]);
    rep.matrices.push_back(std::move(m));
  }

  rep.all_supertraces_zero = true;
  for (const auto& m : rep.matrices) {
    Rat str = m.at(0, 0) - m.at(1, 1) - m.at(2, 2);
    rep.supertraces.push_back(str);
    if (str != 0) rep.all_supertraces_zero = false;
  }

  {  // linear independence of the eight 3x3 images
    RatMatrix flat(static_cast<int>(rep.matrices.size()), 9);
    for (size_t b = 0; b < rep.matrices.size(); ++b)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) flat.at(static_cast<int>(b), i * 3 + j) = rep.matrices[b].at(i, j);
    rep.injective = flat.rank() == static_cast<int>(rep.matrices.size());
  }

  // induced operators on Omega^{..}(Q[x1,x2|xi])
  auto base = Context::make({{"x1", Parity::Even, std::nullopt, false},
                             {"x2", Parity::Even, std::nullopt, false},
                             {"xi", Parity::Odd, std::nullopt, false}});
  auto wc = WeilContext::make(base, o);
  std::vector<Derivation> induced;
  for (const auto& d : basis) induced.push_back(induced_derivation(wc, d));

  // quotient matrices as derivations in the same normalization
  std::vector<AlgDerivation> mat_ders;
  for (size_t b = 0; b < basis.size(); ++b)
    mat_ders.push_back(AlgDerivation{basis[b].label, basis[b].parity, rep.matrices[b]});

  rep.closes = true;
  rep.ok = rep.injective && rep.all_supertraces_zero;
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = a; b < basis.size(); ++b) {
      Sl12BracketEntry entry;
      entry.a = basis[a].label;
      entry.b = basis[b].label;
      AlgDerivation br = alg_bracket(o, basis[a], basis[b]);
      auto coeffs = expand_in(basis, br.action);
      entry.abstract_ok = coeffs.has_value();
      if (!coeffs) {
        rep.closes = false;
        rep.table.push_back(std::move(entry));
        rep.ok = false;
        continue;
      }
      entry.coefficients = *coeffs;

      {  // same relation for the quotient matrices
        int s = (parity_bit(basis[a].parity) && parity_bit(basis[b].parity)) ? -1 : 1;
        RatMatrix got = (rep.matrices[a] * rep.matrices[b] -
                         (rep.matrices[b] * rep.matrices[a]) * Rat(s)) *
                        Rat(-1);
        RatMatrix want(3, 3);
        for (size_t k = 0; k < basis.size(); ++k)
          want = want + rep.matrices[k] * (*coeffs)[k];
        entry.matrix_ok = got == want;
      }

      {  // same relation for the induced vector fields
        Derivation got = Derivation::bracket(induced[a], induced[b]);
        Derivation expected(wc->ctx(), got.parity(), {});
        bool expandable = true;
        for (size_t k = 0; k < basis.size(); ++k) {
          if ((*coeffs)[k] == 0) continue;
          if (induced[k].parity() != got.parity()) {
            expandable = false;
            break;
          }
          expected = Derivation::sum(expected, induced[k].scaled((*coeffs)[k]));
        }
        bool equal = expandable;
        for (VarId v = 0; equal && v < wc->ctx()->size(); ++v)
          if (!(got.image(v) == expected.image(v))) equal = false;
        entry.induced_ok = equal;
      }

      if (!entry.matrix_ok || !entry.induced_ok) rep.ok = false;
      rep.table.push_back(std::move(entry));
    }
  if (!rep.closes) rep.ok = false;
  if (rep.even_count != 4 || rep.odd_count != 4) rep.ok = false;
  return rep;
}

}  // namespace loopforms
