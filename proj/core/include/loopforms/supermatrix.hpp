#pragma once

#include "loopforms/superpoly.hpp"

namespace loopforms {

// Even invertible block matrix of format d1|d2: the diagonal blocks carry
// even entries, the off-diagonal blocks odd ones.
class SuperMatrix {
 public:
  SuperMatrix(ContextPtr ctx, int d1, int d2);

  int d1() const { return d1_; }
  int d2() const { return d2_; }
  int dim() const { return d1_ + d2_; }
  const ContextPtr& context() const { return ctx_; }

  const SuperPoly& at(int i, int j) const;
  void set(int i, int j, SuperPoly v);

  static SuperMatrix identity(ContextPtr ctx, int d1, int d2);
  friend SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b);

  // throws when an entry breaks the block parity pattern
  void validate_parity() const;

 private:
  ContextPtr ctx_;
  int d1_, d2_;
  std::vector<SuperPoly> e_;
};

// Determinant of a square matrix with even (hence central) entries.
SuperPoly even_det(const ContextPtr& ctx, const std::vector<SuperPoly>& m, int n);

// det(A - B D^{-1} C) / det(D)
SuperPoly berezinian(const SuperMatrix& g);

}  // namespace loopforms
