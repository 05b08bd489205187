#pragma once

#include <random>
#include <vector>

#include "loopforms/superpoly.hpp"

namespace testutil {

using namespace loopforms;

// Independent Koszul-sign oracle: expand the factor sequence, bubble-sort
// into canonical position and count adjacent swaps of two odd factors.
// Returns 0 on a repeated odd variable or a cap violation.
inline std::pair<int, Monomial> bubble_sign_oracle(const Context& ctx,
                                                   std::vector<std::pair<VarId, int>> factors) {
  std::vector<VarId> flat;
  for (auto [v, e] : factors)
    for (int i = 0; i < e; ++i) flat.push_back(v);
  auto rank = [&](VarId v) {
    const auto& order = ctx.canonical_order();
    for (size_t i = 0; i < order.size(); ++i)
      if (order[i] == v) return static_cast<int>(i);
    return -1;
  };
  int sign = 1;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (size_t i = 0; i + 1 < flat.size(); ++i)
      if (rank(flat[i]) > rank(flat[i + 1])) {
        if (ctx.parity(flat[i]) == Parity::Odd && ctx.parity(flat[i + 1]) == Parity::Odd)
          sign = -sign;
        std::swap(flat[i], flat[i + 1]);
        swapped = true;
      }
  }
  Monomial m(ctx.size());
  for (VarId v : flat) m.set_exp(v, m.exp(v) + 1);
  for (VarId v = 0; v < ctx.size(); ++v) {
    if (ctx.parity(v) == Parity::Odd && m.exp(v) > 1) return {0, Monomial(ctx.size())};
    int cap = ctx.effective_cap(v);
    if (cap > 0 && m.exp(v) >= cap) return {0, Monomial(ctx.size())};
  }
  return {sign, m};
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  int uniform(int lo, int hi) {  // inclusive
    return static_cast<int>(gen_() % static_cast<uint64_t>(hi - lo + 1)) + lo;
  }

  Rat rational() {
    int num = uniform(-6, 6);
    int den = uniform(1, 4);
    return rat(num, den);
  }

  Rat nonzero_rational() {
    Rat q = rational();
    while (q == 0) q = rational();
    return q;
  }

  Monomial monomial(const Context& ctx, int max_deg) {
    Monomial m(ctx.size());
    int deg = uniform(0, max_deg);
    for (int step = 0; step < deg; ++step) {
      VarId v = uniform(0, ctx.size() - 1);
      int cap = ctx.effective_cap(v);
      if (cap > 0 && m.exp(v) + 1 >= cap) continue;
      m.set_exp(v, m.exp(v) + 1);
    }
    return m;
  }

  SuperPoly poly(const ContextPtr& ctx, int max_deg, int terms) {
    SuperPoly p(ctx);
    for (int i = 0; i < terms; ++i) p.add_term(monomial(*ctx, max_deg), rational());
    return p;
  }

  // homogeneous of the requested parity
  SuperPoly poly_of_parity(const ContextPtr& ctx, Parity parity, int max_deg, int terms) {
    SuperPoly p(ctx);
    int guard = 0;
    while (p.term_count() < terms && guard++ < 40 * terms) {
      Monomial m = monomial(*ctx, max_deg);
      if (m.parity(*ctx) == parity) p.add_term(m, rational());
    }
    return p;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace testutil
