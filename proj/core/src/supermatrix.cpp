#include "loopforms/supermatrix.hpp"

namespace loopforms {

SuperMatrix::SuperMatrix(ContextPtr ctx, int d1, int d2) : ctx_(std::move(ctx)), d1_(d1), d2_(d2) {
  if (d1 < 0 || d2 < 0 || d1 + d2 == 0) throw AlgebraError("bad supermatrix format");
  e_.assign(static_cast<size_t>(dim() * dim()), SuperPoly::zero(ctx_));
}

const SuperPoly& SuperMatrix::at(int i, int j) const {
  return e_.at(static_cast<size_t>(i * dim() + j));
}

void SuperMatrix::set(int i, int j, SuperPoly v) {
  require_same_context(ctx_, v.context(), "supermatrix entry");
  e_.at(static_cast<size_t>(i * dim() + j)) = std::move(v);
}

SuperMatrix SuperMatrix::identity(ContextPtr ctx, int d1, int d2) {
  SuperMatrix m(ctx, d1, d2);
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, SuperPoly::constant(ctx, 1));
  return m;
}

SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b) {
  require_same_context(a.ctx_, b.ctx_, "supermatrix mul");
  if (a.dim() != b.dim() || a.d1_ != b.d1_) throw AlgebraError("supermatrix format mismatch");
  SuperMatrix r(a.ctx_, a.d1_, a.d2_);
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      SuperPoly s = SuperPoly::zero(a.ctx_);
      for (int k = 0; k < a.dim(); ++k) s += a.at(i, k) * b.at(k, j);
      r.set(i, j, std::move(s));
    }
  return r;
}

void SuperMatrix::validate_parity() const {
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) {
      const SuperPoly& v = at(i, j);
      if (v.is_zero()) continue;
      bool diag_block = (i < d1_) == (j < d1_);
      Parity want = diag_block ? Parity::Even : Parity::Odd;
      if (!v.is_homogeneous(want))
        throw AlgebraError("supermatrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                           ") breaks the block parity pattern");
    }
}

SuperPoly even_det(const ContextPtr& ctx, const std::vector<SuperPoly>& m, int n) {
  if (n == 0) return SuperPoly::constant(ctx, 1);
  if (n == 1) return m[0];
  // cofactor expansion along the first row; entries are even and commute
  SuperPoly det = SuperPoly::zero(ctx);
  for (int j = 0; j < n; ++j) {
    if (m[static_cast<size_t>(j)].is_zero()) continue;
    std::vector<SuperPoly> minor;
    minor.reserve(static_cast<size_t>((n - 1) * (n - 1)));
    for (int r = 1; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (c != j) minor.push_back(m[static_cast<size_t>(r * n + c)]);
    SuperPoly term = m[static_cast<size_t>(j)] * even_det(ctx, minor, n - 1);
    det += (j % 2 == 0) ? term : -term;
  }
  return det;
}

namespace {

// adjugate-based inverse of an even square matrix with unit determinant part
std::vector<SuperPoly> even_inverse(const ContextPtr& ctx, const std::vector<SuperPoly>& m,
                                    int n) {
  SuperPoly det = even_det(ctx, m, n);
  SuperPoly det_inv = det.invert_unit();
  std::vector<SuperPoly> inv(static_cast<size_t>(n * n), SuperPoly::zero(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<SuperPoly> minor;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0; c < n; ++c)
          if (c != j) minor.push_back(m[static_cast<size_t>(r * n + c)]);
      }
      SuperPoly cof = even_det(ctx, minor, n - 1);
      if ((i + j) % 2) cof = -cof;
      inv[static_cast<size_t>(j * n + i)] = cof * det_inv;  // transpose of cofactors
    }
  return inv;
}

}  // namespace

SuperPoly berezinian(const SuperMatrix& g) {
  g.validate_parity();
  const ContextPtr& ctx = g.context();
  int d1 = g.d1(), d2 = g.d2();

  std::vector<SuperPoly> D;
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < d2; ++j) D.push_back(g.at(d1 + i, d1 + j));
  SuperPoly detD = even_det(ctx, D, d2);
  if (detD.scalar_part() == 0) throw AlgebraError("berezinian: det(D) has no invertible scalar part");
  std::vector<SuperPoly> Dinv = d2 ? even_inverse(ctx, D, d2) : D;

  // S = A - B D^{-1} C
  std::vector<SuperPoly> S(static_cast<size_t>(d1 * d1), SuperPoly::zero(ctx));
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) {
      SuperPoly s = g.at(i, j);
      for (int k = 0; k < d2; ++k)
        for (int l = 0; l < d2; ++l)
          s -= g.at(i, d1 + k) * Dinv[static_cast<size_t>(k * d2 + l)] * g.at(d1 + l, j);
      S[static_cast<size_t>(i * d1 + j)] = std::move(s);
    }
  SuperPoly detS = even_det(ctx, S, d1);
  if (detS.scalar_part() == 0)
    throw AlgebraError("berezinian: det(A - B D^{-1} C) has no invertible scalar part");
  return detS * detD.invert_unit();
}

}  // namespace loopforms
