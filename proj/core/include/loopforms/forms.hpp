#pragma once

#include "loopforms/superpoly.hpp"

namespace loopforms {

// Context holding base variables plus, for each base variable v, the
// parity-flipped twin d(v). The form degree of a monomial is its total
// exponent over the twins.
class FormContext {
 public:
  // Twin of an odd variable is even and gets nil_cap `even_twin_cap`
  // (0 = uncapped); twin of an even variable is odd (implicit cap 2).
  static std::shared_ptr<const FormContext> make(std::vector<VarSpec> base,
                                                 int even_twin_cap = 0);

  const ContextPtr& ctx() const { return ctx_; }
  int n_base() const { return n_base_; }
  VarId base_var(int i) const { return i; }
  bool is_twin(VarId v) const { return v >= n_base_; }
  VarId twin(VarId v) const;
  VarId base_of(VarId v) const;

  int form_degree(const Monomial& m) const;
  // total degree with every base variable and twin weighted 1
  int euler_weight(const Monomial& m) const { return m.total_degree(); }

  const Derivation& d() const { return *d_; }
  const Derivation& euler_contraction() const { return *iota_; }

 private:
  ContextPtr ctx_;
  int n_base_ = 0;
  std::shared_ptr<Derivation> d_, iota_;
};

using FormContextPtr = std::shared_ptr<const FormContext>;

struct DifferentialForm {
  FormContextPtr fc;
  SuperPoly poly;

  bool operator==(const DifferentialForm& o) const { return poly == o.poly; }
  DifferentialForm operator+(const DifferentialForm& o) const { return {fc, poly + o.poly}; }
  DifferentialForm operator-(const DifferentialForm& o) const { return {fc, poly - o.poly}; }
  DifferentialForm operator*(const DifferentialForm& o) const { return {fc, poly * o.poly}; }
  bool is_zero() const { return poly.is_zero(); }
  std::string to_string() const { return poly.to_string(); }
};

DifferentialForm de_rham_d(const DifferentialForm& w);
bool is_closed(const DifferentialForm& w);

// homogeneous pieces by form degree; keys with zero component omitted
std::map<int, DifferentialForm> form_degree_parts(const DifferentialForm& w);

// h = contraction with the Euler field scaled by 1/weight per monomial;
// satisfies d h + h d = id away from weight zero.
DifferentialForm euler_homotopy(const DifferentialForm& w);

// Primitive of a closed form with no weight-zero part: returns h(w) and
// checks d(h(w)) = w before returning.
DifferentialForm poincare_homotopy(const DifferentialForm& w);

}  // namespace loopforms
