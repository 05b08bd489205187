#pragma once

#include "loopforms/localalg.hpp"
#include "loopforms/superpoly.hpp"

#include <array>

namespace loopforms {

// The near-point algebra A^o of a free super-polynomial algebra A: one
// generator x[i] per base generator x and basis element e_i, with
// parity |x[i]| = |x| + |e_i| and x[0] playing the role of x itself.
class WeilContext {
 public:
  static std::shared_ptr<const WeilContext> make(ContextPtr base, LocalSuperAlgebra o);

  const ContextPtr& base() const { return base_; }
  const LocalSuperAlgebra& algebra() const { return o_; }
  const ContextPtr& ctx() const { return ctx_; }

  VarId gen(VarId base_var, int i) const;  // the variable x[i]
  VarId base_var_of(VarId v) const { return v / o_.dim(); }
  int mode_of(VarId v) const { return v % o_.dim(); }

  SuperPoly embed(const SuperPoly& f) const;  // x -> x[0]

 private:
  ContextPtr base_;
  LocalSuperAlgebra o_;
  ContextPtr ctx_;
};

using WeilContextPtr = std::shared_ptr<const WeilContext>;

// Element of SuperPoly(A^o) tensor o, as components along the basis of o.
class WeilTensor {
 public:
  WeilTensor(WeilContextPtr wc);
  static WeilTensor scalar(WeilContextPtr wc, const SuperPoly& p);

  const SuperPoly& component(int i) const { return comps_.at(static_cast<size_t>(i)); }
  SuperPoly& component(int i) { return comps_.at(static_cast<size_t>(i)); }

  WeilTensor& operator+=(const WeilTensor& o);
  friend WeilTensor operator*(const WeilTensor& a, const WeilTensor& b);

 private:
  WeilContextPtr wc_;
  std::vector<SuperPoly> comps_;
};

// Components (f_i) of f under x -> sum_i x[i] e_i.
std::vector<SuperPoly> weil_expand(const WeilContextPtr& wc, const SuperPoly& f);

// The vector field on the near-point context induced by a derivation of o:
// x[k] -> sum_i (-1)^{|delta| (1 + |e_i|)} d_i^k x[i].
Derivation induced_derivation(const WeilContextPtr& wc, const AlgDerivation& delta);

struct Sl12BracketEntry {
  std::string a, b;
  std::vector<Rat> coefficients;  // expansion of [a, b] in the 8 basis operators
  bool abstract_ok = false;       // bracket closes in the span
  bool matrix_ok = false;         // 3x3 matrices satisfy the same relation
  bool induced_ok = false;        // induced operators satisfy the same relation
};

struct Sl12Report {
  std::vector<std::string> labels;
  std::vector<Parity> parities;
  std::vector<RatMatrix> matrices;  // 3x3 on C^{1|2}, basis eta1 eta2 | eta1, eta2
  std::vector<Rat> supertraces;
  int even_count = 0, odd_count = 0;
  bool injective = false;
  bool all_supertraces_zero = false;
  std::vector<Sl12BracketEntry> table;  // 36 unordered pairs
  bool closes = false;
  bool ok = false;
};

// Verifies the der(Lambda[eta1,eta2]) -> sl(1|2) story by explicit
// computation; the induced side runs on Omega^{..}(Q[x1,x2|xi]).
Sl12Report sl12_structure_check();

}  // namespace loopforms
