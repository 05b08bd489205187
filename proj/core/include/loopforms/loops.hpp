#pragma once

#include "loopforms/forms.hpp"
#include "loopforms/laurent.hpp"

namespace loopforms {

// Assignment of a nil-Laurent series to every base coordinate of X. The
// coefficients live in a form context of their own (coefficient and
// parameter variables, each with its differential twin).
struct LoopPoint {
  FormContextPtr base_fc;   // X, the source of the forms being pulled back
  FormContextPtr value_fc;  // where coefficients and outputs live
  std::vector<NilLaurent> coords;  // per base variable of X

  // checks parities and nilpotency of every negative coefficient
  void validate() const;
};

// every monomial contains a capped or odd variable
bool is_nilpotent(const SuperPoly& p);

// Symbolic loop x_i(t) = sum_{n in [min_exp, max_exp]} x_i[n] t^n with the
// negative coefficients capped at neg_cap.
class LoopContext {
 public:
  static LoopContext make(const FormContextPtr& base_fc, int min_exp, int max_exp, int neg_cap,
                          std::vector<VarSpec> extra_params = {});

  const FormContextPtr& base() const { return base_fc_; }
  const FormContextPtr& value() const { return value_fc_; }
  int min_exp() const { return min_exp_; }
  int max_exp() const { return max_exp_; }
  VarId coeff_var(int base_i, int n) const;

  // mode weight of a value variable: n for x_i[n] and its twin, 0 for params
  int rotation_weight(VarId v) const;

  LoopPoint generic_point() const;

 private:
  FormContextPtr base_fc_, value_fc_;
  int min_exp_ = 0, max_exp_ = 0;
  std::map<std::pair<int, int>, VarId> coeff_;
  std::vector<int> weight_;  // per value base var
};

// Substitutes x_i -> x_i(t), dx_i -> (d/dt x_i) dt + sum t^n d(coeff), and
// splits off the dt part (kept rightmost).
LaurentForm ev_pullback(const DifferentialForm& eta, const LoopPoint& gamma);

// coefficient of t^{-1} dt
SuperPoly residue(const LaurentForm& w);

// Res of the (1, m-1) projection of the pullback; needs form degree >= 1.
SuperPoly transgress(const DifferentialForm& eta, const LoopPoint& gamma);

// transgression of the Euler primitive of a closed 2-form
SuperPoly radon(const DifferentialForm& omega, const LoopPoint& gamma);

// Evaluator closed over the 1-form it transgresses, so the Hessian, Taylor
// and additivity probes all share one evaluation path.
class LoopEvaluator {
 public:
  static LoopEvaluator transgression(DifferentialForm eta);
  static LoopEvaluator radon(DifferentialForm omega);

  SuperPoly operator()(const LoopPoint& gamma) const;
  const DifferentialForm& primitive() const { return eta_; }
  const FormContextPtr& base() const { return eta_.fc; }
  int max_degree() const;  // of the primitive, for window sizing

 private:
  explicit LoopEvaluator(DifferentialForm eta) : eta_(std::move(eta)) {}
  DifferentialForm eta_;
};

// Pairing of the t^{-n} and t^{n} tangent modes at a base point: the
// two-marker coefficient of f on  u t^{-n} + x0 + w t^n.  A rational base
// point needs one value per even coordinate (odd slots must be zero);
// without one the base point stays symbolic and the result is a function
// of the coordinates.
SuperPoly hessian_form(const LoopEvaluator& f, const std::optional<std::vector<Rat>>& point,
                       int n, int i, int j);

struct ScalingCheck {
  int n = 0;
  bool ok = true;
  std::vector<std::string> mismatches;
};

// omega^{+-n} = n * omega^{+-1} at a symbolic base point, all pairs (i,j)
ScalingCheck psi_n_scaling_check(const LoopEvaluator& f, int n);

struct TaylorProfile {
  FormContextPtr value_fc;
  std::map<std::pair<int, int>, SuperPoly> omega;          // x_i[-1] x_j[1]
  std::map<std::array<int, 3>, SuperPoly> psi;             // x_i[-1] x_j[-1] x_k[2], i <= j
  std::map<std::array<int, 4>, SuperPoly> phi;             // i <= j, k <= l
  SuperPoly higher;        // quasi-degree-0 remainder outside the patterns
  bool quasihomogeneous = true;
  SuperPoly failure_part;  // nonzero only when quasihomogeneity fails
};

// expansion of f on the window [-1, 2] with negative coefficients capped at d
TaylorProfile taylor_profile(const LoopEvaluator& f, int d);

}  // namespace loopforms
