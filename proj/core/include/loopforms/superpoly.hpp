#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "loopforms/context.hpp"
#include "loopforms/rational.hpp"

namespace loopforms {

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exponent vector over a context, compared lexicographically. Odd exponents
// are always 0 or 1, capped exponents stay below their cap, laurent
// exponents may be negative. Equal exponent vectors are the same monomial.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int nvars) : exps_(static_cast<size_t>(nvars), 0) {}

  int exp(VarId v) const { return exps_[static_cast<size_t>(v)]; }
  void set_exp(VarId v, int e) {
    deg_ += e - exps_[static_cast<size_t>(v)];
    exps_[static_cast<size_t>(v)] = e;
  }
  int nvars() const { return static_cast<int>(exps_.size()); }
  bool is_one() const;
  int total_degree() const { return deg_; }  // laurent exponents included as-is

  Parity parity(const Context& ctx) const;

  // graded order: by total degree, then powers of earlier variables first
  std::strong_ordering operator<=>(const Monomial& o) const {
    if (auto c = deg_ <=> o.deg_; c != 0) return c;
    return o.exps_ <=> exps_;
  }
  bool operator==(const Monomial& o) const { return exps_ == o.exps_; }

 private:
  std::vector<int> exps_;
  int deg_ = 0;
};

// Koszul-normalizes a factor sequence. Returns sign 0 (and the zero
// monomial) when an odd variable repeats or a nil_cap is exceeded.
std::pair<int, Monomial> normalize_monomial(const Context& ctx,
                                            std::span<const std::pair<VarId, int>> factors);

// Sign incurred when multiplying two already-canonical monomials, together
// with the combined exponent vector; sign 0 on cap/odd-square truncation.
std::pair<int, Monomial> merge_monomials(const Context& ctx, const Monomial& a, const Monomial& b);

class SuperPoly {
 public:
  SuperPoly() = default;
  explicit SuperPoly(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  static SuperPoly zero(ContextPtr ctx) { return SuperPoly(std::move(ctx)); }
  static SuperPoly constant(ContextPtr ctx, const Rat& c);
  static SuperPoly variable(ContextPtr ctx, VarId v, int power = 1);
  static SuperPoly variable(ContextPtr ctx, std::string_view name, int power = 1);
  static SuperPoly monomial(ContextPtr ctx, Monomial m, const Rat& c);

  const ContextPtr& context() const { return ctx_; }
  const std::map<Monomial, Rat>& terms() const& { return terms_; }
  const std::map<Monomial, Rat>& terms() && = delete;  // would dangle
  bool is_zero() const { return terms_.empty(); }
  int term_count() const { return static_cast<int>(terms_.size()); }

  // defined only when all monomials share one parity
  std::optional<Parity> parity() const;
  bool is_homogeneous(Parity p) const { return is_zero() || parity() == p; }

  Rat coefficient(const Monomial& m) const;
  Rat scalar_part() const;                 // coefficient of 1
  SuperPoly without_scalar_part() const;   // p - scalar_part()

  void add_term(const Monomial& m, const Rat& c);

  SuperPoly operator-() const;
  SuperPoly& operator+=(const SuperPoly& o);
  SuperPoly& operator-=(const SuperPoly& o);
  friend SuperPoly operator+(SuperPoly a, const SuperPoly& b) { return a += b; }
  friend SuperPoly operator-(SuperPoly a, const SuperPoly& b) { return a -= b; }
  friend SuperPoly operator*(const SuperPoly& a, const SuperPoly& b) { return mul(a, b); }
  SuperPoly& operator*=(const SuperPoly& o) { return *this = mul(*this, o); }
  SuperPoly& operator*=(const Rat& c);
  friend SuperPoly operator*(SuperPoly a, const Rat& c) { return a *= c; }
  friend SuperPoly operator*(const Rat& c, SuperPoly a) { return a *= c; }
  bool operator==(const SuperPoly& o) const;

  static SuperPoly mul(const SuperPoly& a, const SuperPoly& b);
  SuperPoly pow(int e) const;

  // odd monomials scaled by -1; the Koszul twist past one odd element
  SuperPoly parity_twisted() const;

  // Ring homomorphism determined by generator images; generators absent
  // from `images` are transported to `target` by name. Images must be
  // parity-homogeneous of the generator's parity.
  SuperPoly substitute(const std::map<VarId, SuperPoly>& images, const ContextPtr& target) const;

  // Inverse of c + n with c a nonzero rational and n nilpotent (every
  // monomial of n must contain a capped or odd variable).
  SuperPoly invert_unit() const;

  // Extracts the coefficient of the given marker monomial, with the marker
  // transported to the right of each term first. Terms whose exponents in
  // the marker variables do not match exactly are dropped.
  SuperPoly coefficient_of_right(const Monomial& marker) const;

  // Collects terms by an integer key of their monomials.
  std::map<int, SuperPoly> split_by(const std::function<int(const Monomial&)>& key) const;

  std::string to_string() const;

 private:
  ContextPtr ctx_;
  std::map<Monomial, Rat> terms_;
};

std::string monomial_to_string(const Context& ctx, const Monomial& m);

// Graded derivation, determined by generator images and extended by the
// super-Leibniz rule d(ab) = d(a) b + (-1)^{|d||a|} a d(b).
class Derivation {
 public:
  Derivation(ContextPtr ctx, Parity parity, std::map<VarId, SuperPoly> images);

  const ContextPtr& context() const { return ctx_; }
  Parity parity() const { return parity_; }
  const SuperPoly& image(VarId v) const;

  SuperPoly operator()(const SuperPoly& p) const;

  // graded commutator  [a,b] = a b - (-1)^{|a||b|} b a
  static Derivation bracket(const Derivation& a, const Derivation& b);

  Derivation scaled(const Rat& c) const;
  static Derivation sum(const Derivation& a, const Derivation& b);

 private:
  ContextPtr ctx_;
  Parity parity_;
  std::vector<SuperPoly> images_;
};

}  // namespace loopforms
