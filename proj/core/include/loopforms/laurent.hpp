#pragma once

#include "loopforms/superpoly.hpp"

namespace loopforms {

struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite Laurent expansion with tracked validity: coefficients of t^n for
// n <= valid_to() are exact, higher ones are unknown. A series without a
// validity bound is exact (all unstored coefficients vanish).
class NilLaurent {
 public:
  NilLaurent() = default;
  explicit NilLaurent(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  static NilLaurent term(ContextPtr ctx, int n, SuperPoly c);

  const ContextPtr& context() const { return ctx_; }
  const std::map<int, SuperPoly>& terms() const& { return terms_; }
  const std::map<int, SuperPoly>& terms() && = delete;  // would dangle
  std::optional<int> valid_to() const { return valid_to_; }
  bool is_exact() const { return !valid_to_.has_value(); }

  void add_term(int n, const SuperPoly& c);
  void set_valid_to(std::optional<int> k);

  // exact coefficient of t^n; throws WindowError beyond the window
  SuperPoly coefficient(int n) const;
  bool covers(int n) const { return !valid_to_ || n <= *valid_to_; }

  // lower bound for the lowest exponent carrying a nonzero coefficient
  int min_exp_bound() const;

  NilLaurent operator-() const;
  friend NilLaurent operator+(const NilLaurent& a, const NilLaurent& b);
  friend NilLaurent operator-(const NilLaurent& a, const NilLaurent& b);
  friend NilLaurent operator*(const NilLaurent& a, const NilLaurent& b);
  NilLaurent operator*(const SuperPoly& c) const;
  NilLaurent operator*(const Rat& c) const;
  bool operator==(const NilLaurent& o) const;

  NilLaurent ddt() const;               // termwise n t^{n-1}, validity drops by one
  NilLaurent truncated(int k) const;    // forget everything above t^k

  // multiplies every coefficient's odd part by -1
  NilLaurent parity_twisted() const;

  std::string to_string(const std::string& var = "t") const;

 private:
  void drop_invalid();
  ContextPtr ctx_;
  std::map<int, SuperPoly> terms_;
  std::optional<int> valid_to_;
};

// Element  transverse + dt_coeff * dt  of the form ring over a Laurent
// series ring, with dt odd and kept in the rightmost slot.
struct LaurentForm {
  NilLaurent transverse;
  NilLaurent dt_coeff;

  static LaurentForm scalar(NilLaurent s) {
    NilLaurent z(s.context());
    return {std::move(s), std::move(z)};
  }

  friend LaurentForm operator+(const LaurentForm& a, const LaurentForm& b) {
    return {a.transverse + b.transverse, a.dt_coeff + b.dt_coeff};
  }
  // (a + b dt)(c + e dt) = a c + (a e + b twist(c)) dt
  friend LaurentForm operator*(const LaurentForm& a, const LaurentForm& b) {
    return {a.transverse * b.transverse,
            a.transverse * b.dt_coeff + a.dt_coeff * b.transverse.parity_twisted()};
  }
  LaurentForm operator*(const Rat& c) const { return {transverse * c, dt_coeff * c}; }
};

}  // namespace loopforms
