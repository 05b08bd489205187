#pragma once

#include "loopforms/loops.hpp"

namespace loopforms {

// One first-order pole of a rational loop: the coordinate term is
//   residue / (orientation * (t - location)),
// so the expansion in the local coordinate s = orientation * (t - location)
// starts with residue * s^{-1}.
struct Pole {
  SuperPoly location;  // affine-linear in the lambda variable
  int orientation = 1;
  std::vector<SuperPoly> residues;  // one per base coordinate
};

struct PoleFamily {
  FormContextPtr base_fc;
  FormContextPtr value_fc;  // parameters; must contain the laurent lambda
  std::vector<Pole> poles;
  std::vector<NilLaurent> tail;  // regular part per coordinate, polynomial in t

  void validate() const;  // distinct locations, nilpotent residues, parities
};

// inverse of c * lambda^k (single Laurent monomial); error otherwise
SuperPoly invert_simple(const SuperPoly& p);

// Laurent expansion of every coordinate at the given pole in its local
// coordinate, exact up to s^K.
LoopPoint expand_rational_loop(const PoleFamily& family, size_t pole, int K);

struct AdditivityReport {
  SuperPoly value;                          // sum of the per-pole evaluations
  std::map<int, SuperPoly> lambda_negative; // coefficients at lambda^{-1}, ...
  bool regular = false;                     // all of them vanish
};

// Evaluates f at every pole expansion, sums, and reads off the negative
// lambda powers; the expansion order is grown until the residues are exact.
AdditivityReport additivity_check(const LoopEvaluator& f, const PoleFamily& family);

// per-pole sum of f over the family
SuperPoly family_value(const LoopEvaluator& f, const PoleFamily& family);

struct DegeneratePoleFamily {
  PoleFamily family;   // simple poles at 0, -lambda, ..., -(M-1) lambda
  LoopPoint original;  // the lambda = 0 loop with poles of order up to M
};

// x(t) = sum_{p=2}^M x_{-p} / (t (t+lambda) ... (t+(p-1)lambda)) + regular,
// given the coefficients x_{i,n} for n in [-M, tail_max].
DegeneratePoleFamily degenerate_pole_family(
    const FormContextPtr& base_fc, const FormContextPtr& value_fc, VarId lambda,
    const std::map<std::pair<int, int>, SuperPoly>& coefficients, int M);

// drops the strictly positive lambda powers; error on negative ones
SuperPoly specialize_lambda_to_zero(const SuperPoly& p, VarId lambda);

}  // namespace loopforms
