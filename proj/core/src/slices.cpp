#include "loopforms/slices.hpp"

#include <algorithm>
#include <functional>

namespace loopforms {

namespace {

struct GenInfo {
  VarId var;
  int di, dj;  // bidegree contribution
  int cap;     // 0 = unbounded
  bool zero_mode;
};

}  // namespace

BigradedSlice BigradedSlice::build(ContextPtr base, SliceCaps caps) {
  BigradedSlice s;
  s.caps_ = caps;
  s.wc_ = WeilContext::make(std::move(base), LocalSuperAlgebra::exterior(2));
  const auto& wc = *s.wc_;
  const Context& ctx = *wc.ctx();

  std::vector<GenInfo> gens;
  for (VarId v = 0; v < ctx.size(); ++v) {
    int mode = wc.mode_of(v);
    GenInfo g;
    g.var = v;
    g.di = (mode == 1 || mode == 3) ? 1 : 0;
    g.dj = (mode == 2 || mode == 3) ? 1 : 0;
    g.cap = ctx.effective_cap(v);
    g.zero_mode = mode == 0;
    gens.push_back(g);
  }

  long total = 0;
  for (int i = 0; i <= caps.imax; ++i)
    for (int j = 0; j <= caps.jmax; ++j) {
      std::vector<Monomial> basis;
      Monomial cur(ctx.size());
      std::function<void(size_t, int, int, int)> rec = [&](size_t g, int ri, int rj, int zdeg) {
        if (ri < 0 || rj < 0) return;
        if (g == gens.size()) {
          if (ri == 0 && rj == 0) basis.push_back(cur);
          return;
        }
        const GenInfo& gi = gens[g];
        constexpr int kUnbounded = 1 << 28;
        int emax;
        if (gi.cap > 0)
          emax = gi.cap - 1;
        else if (gi.zero_mode)
          emax = caps.internal_cap - zdeg;
        else if (gi.di || gi.dj)
          emax = std::min(gi.di ? ri : kUnbounded, gi.dj ? rj : kUnbounded);
        else
          emax = 0;
        if (gi.zero_mode) emax = std::min(emax, caps.internal_cap - zdeg);
        for (int e = 0; e <= emax; ++e) {
          cur.set_exp(gi.var, e);
          rec(g + 1, ri - e * gi.di, rj - e * gi.dj, zdeg + (gi.zero_mode ? e : 0));
        }
        cur.set_exp(gi.var, 0);
      };
      rec(0, i, j, 0);
      std::sort(basis.begin(), basis.end());
      total += static_cast<long>(basis.size());
      if (total > caps.max_basis)
        throw AlgebraError("slice caps produce more than max_basis monomials");
      auto key = std::make_pair(i, j);
      auto& idx = s.index_[key];
      for (size_t k = 0; k < basis.size(); ++k) idx.emplace(basis[k], static_cast<int>(k));
      s.bases_.emplace(key, std::move(basis));
    }

  for (const auto& d : der_o_basis(2)) {
    s.ops_.emplace(d.label, induced_derivation(s.wc_, d));
    // bidegree shift read off the action on the grading
    auto shift_of = [&](const std::string& l) -> std::pair<int, int> {
      if (l == "D1") return {1, 0};
      if (l == "D2") return {0, 1};
      if (l == "D1*") return {-1, 0};
      if (l == "D2*") return {0, -1};
      if (l == "E") return {1, -1};
      if (l == "F") return {-1, 1};
      return {0, 0};
    };
    s.shifts_.emplace(d.label, shift_of(d.label));
  }
  return s;
}

const std::vector<Monomial>& BigradedSlice::basis(int i, int j) const {
  static const std::vector<Monomial> empty;
  auto it = bases_.find({i, j});
  return it == bases_.end() ? empty : it->second;
}

int BigradedSlice::internal_degree(const Monomial& m) const {
  int d = 0;
  const auto& wc = *wc_;
  for (VarId v = 0; v < wc.ctx()->size(); ++v)
    if (wc.mode_of(v) == 0) d += m.exp(v);
  return d;
}

std::vector<int> BigradedSlice::weights(int i, int j) const {
  std::vector<int> ws;
  for (const Monomial& m : basis(i, j)) {
    int w = m.total_degree();
    if (ws.empty() || ws.back() != w) ws.push_back(w);
  }
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return ws;
}

std::vector<int> BigradedSlice::stratum(int i, int j, int w) const {
  std::vector<int> idx;
  const auto& b = basis(i, j);
  for (size_t k = 0; k < b.size(); ++k)
    if (b[k].total_degree() == w) idx.push_back(static_cast<int>(k));
  return idx;
}

bool BigradedSlice::stratum_complete(int i, int j, int w) const {
  return w - std::max(i, j) <= caps_.internal_cap;
}

const Derivation& BigradedSlice::op(const std::string& label) const {
  auto it = ops_.find(label);
  if (it == ops_.end()) throw AlgebraError("unknown slice operator: " + label);
  return it->second;
}

std::pair<int, int> BigradedSlice::op_shift(const std::string& label) const {
  return shifts_.at(label);
}

RatMatrix BigradedSlice::matrix_of(const std::string& label, int i, int j) const {
  auto [si, sj] = op_shift(label);
  int i2 = i + si, j2 = j + sj;
  const auto& src = basis(i, j);
  const auto& dst_index =
      index_.count({i2, j2}) ? index_.at({i2, j2}) : std::map<Monomial, int>{};
  const Derivation& d = op(label);
  RatMatrix m(index_.count({i2, j2}) ? dim(i2, j2) : 0, static_cast<int>(src.size()));
  for (size_t col = 0; col < src.size(); ++col) {
    SuperPoly img = d(SuperPoly::monomial(wc_->ctx(), src[col], Rat(1)));
    for (const auto& [mon, c] : img.terms()) {
      auto it = dst_index.find(mon);
      if (it == dst_index.end())
        throw AlgebraError("slice operator image leaves the enumerated basis");
      m.at(it->second, static_cast<int>(col)) = c;
    }
  }
  return m;
}

RatMatrix BigradedSlice::matrix_on_stratum(const std::string& label, int i, int j, int w) const {
  auto [si, sj] = op_shift(label);
  int i2 = i + si, j2 = j + sj;
  std::vector<int> src = stratum(i, j, w);
  std::vector<int> dst = stratum(i2, j2, w);
  std::map<int, int> dstpos;
  for (size_t k = 0; k < dst.size(); ++k) dstpos.emplace(dst[k], static_cast<int>(k));
  RatMatrix full = matrix_of(label, i, j);
  RatMatrix m(static_cast<int>(dst.size()), static_cast<int>(src.size()));
  for (size_t c = 0; c < src.size(); ++c)
    for (int r = 0; r < full.rows(); ++r) {
      if (full.at(r, src[c]) == 0) continue;
      m.at(dstpos.at(r), static_cast<int>(c)) = full.at(r, src[c]);
    }
  return m;
}

ExactnessReport row_exactness_report(const BigradedSlice& slice, int row,
                                     const std::string& differential) {
  if (differential != "D1" && differential != "D2")
    throw AlgebraError("row_exactness_report: differential must be D1 or D2");
  const bool rows = differential == "D1";
  const std::string homotopy = rows ? "D1*" : "D2*";
  const int limit = rows ? slice.caps().imax : slice.caps().jmax;

  auto at = [&](int pos) { return rows ? std::make_pair(pos, row) : std::make_pair(row, pos); };

  ExactnessReport rep;
  rep.row = row;
  rep.differential = differential;

  std::vector<int> ranks(static_cast<size_t>(limit + 1), 0);
  std::vector<bool> rank_known(static_cast<size_t>(limit + 1), false);
  for (int pos = 0; pos <= limit; ++pos) {
    if (pos + 1 <= limit) {
      auto [i, j] = at(pos);
      ranks[static_cast<size_t>(pos)] = slice.matrix_of(differential, i, j).rank();
      rank_known[static_cast<size_t>(pos)] = true;
    }
  }

  for (int pos = 0; pos <= limit; ++pos) {
    auto [i, j] = at(pos);
    ExactnessPosition p;
    p.position = pos;
    p.dimension = slice.dim(i, j);
    p.verifiable = rank_known[static_cast<size_t>(pos)];
    if (p.verifiable) {
      p.dim_kernel = p.dimension - ranks[static_cast<size_t>(pos)];
      p.dim_image_prev = pos >= 1 ? ranks[static_cast<size_t>(pos - 1)] : 0;
      p.defect = p.dim_kernel - p.dim_image_prev;
      if (row >= 1 && p.defect != 0) rep.interior_exact = false;
    }

    if (pos + 1 <= limit) {  // homotopy identity D D* + D* D = row * id here
      RatMatrix acc(p.dimension, p.dimension);
      auto [i2, j2] = at(pos + 1);
      acc = acc + slice.matrix_of(homotopy, i2, j2) * slice.matrix_of(differential, i, j);
      if (pos >= 1) {
        // out of the first quadrant the homotopy contributes nothing
        auto [i0, j0] = at(pos - 1);
        acc = acc + slice.matrix_of(differential, i0, j0) * slice.matrix_of(homotopy, i, j);
      }
      p.homotopy_identity = acc == RatMatrix::identity(p.dimension) * Rat(row);
    } else {
      p.homotopy_identity = true;  // not checkable at the window boundary
    }
    rep.positions.push_back(p);
  }
  return rep;
}

namespace {

// columns of `vectors` (as coordinates in the (i,j) basis) mapped through
// op and re-expressed in the kernel basis `target` of the destination
RatMatrix restrict_to_kernels(const BigradedSlice& slice, const std::string& label, int i, int j,
                              int w, const RatMatrix& vectors, const RatMatrix& target) {
  RatMatrix big = slice.matrix_on_stratum(label, i, j, w) * vectors;
  RatMatrix out(target.cols(), vectors.cols());
  for (int c = 0; c < big.cols(); ++c) {
    std::vector<Rat> rhs;
    for (int r = 0; r < big.rows(); ++r) rhs.push_back(big.at(r, c));
    auto sol = target.solve(rhs);
    if (!sol) throw AlgebraError("restriction does not land in the kernel");
    for (int r = 0; r < target.cols(); ++r) out.at(r, c) = (*sol)[static_cast<size_t>(r)];
  }
  return out;
}

}  // namespace

TruncationCompareReport truncation_cohomology_compare(const ContextPtr& base, int p,
                                                      const SliceCaps& caps_in) {
  if (p < 1) throw AlgebraError("truncation_cohomology_compare: p >= 1");
  TruncationCompareReport rep;
  rep.p = p;

  const int Q = caps_in.jmax;                        // number of slots reported
  const int W = caps_in.internal_cap + p + 1;        // weight strata, last one flagged

  SliceCaps caps = caps_in;
  caps.imax = std::max(caps_in.imax, p + 1);
  caps.jmax = std::max({caps_in.jmax, Q + 1, p + Q + 1});
  BigradedSlice slice = BigradedSlice::build(base, caps);

  for (int w = 0; w <= W; ++w) {
    // left side: kernels of D1 at (p, q), complex under D2
    std::vector<RatMatrix> K;  // kernel bases per q = 0..Q+1
    for (int q = 0; q <= Q + 1; ++q)
      K.push_back(slice.matrix_on_stratum("D1", p, q, w).kernel_basis());
    std::vector<RatMatrix> L;  // D2 restricted: K_q -> K_{q+1}
    for (int q = 0; q <= Q; ++q)
      L.push_back(restrict_to_kernels(slice, "D2", p, q, w, K[static_cast<size_t>(q)],
                                      K[static_cast<size_t>(q + 1)]));

    // right side: [ker D2 -> V^{0,p} -> V^{0,p+1} -> ...]
    std::vector<RatMatrix> R;  // D2 on the 0-th column, slot q >= 1 is V^{0,p+q-1}
    for (int q = 1; q <= Q + 1; ++q)
      R.push_back(slice.matrix_on_stratum("D2", 0, p + q - 1, w));

    for (int q = 0; q <= Q; ++q) {
      CohomologySlot slot;
      slot.q = q;
      slot.weight = w;

      // left cohomology at q
      int ker_left = K[static_cast<size_t>(q)].cols() - L[static_cast<size_t>(q)].rank();
      int im_left = q >= 1 ? L[static_cast<size_t>(q - 1)].rank() : 0;
      slot.left_dim = ker_left - im_left;

      // right cohomology at q
      if (q == 0 || q == 1) {
        slot.right_dim = 0;  // inclusion followed by its own kernel
      } else {
        const RatMatrix& out = R[static_cast<size_t>(q - 1)];
        const RatMatrix& in = R[static_cast<size_t>(q - 2)];
        int dim_space = out.cols();
        slot.right_dim = (dim_space - out.rank()) - in.rank();
      }

      bool complete = true;
      for (int qq = std::max(0, q - 1); qq <= q + 1; ++qq) {
        if (!slice.stratum_complete(p, qq, w)) complete = false;
        if (!slice.stratum_complete(p + 1, qq, w)) complete = false;
      }
      for (int qq = std::max(1, q - 1); qq <= q + 1; ++qq)
        if (!slice.stratum_complete(0, p + qq - 1, w)) complete = false;
      slot.comparable = complete;
      slot.equal = slot.left_dim == slot.right_dim;
      if (slot.comparable && !slot.equal) rep.all_comparable_equal = false;
      rep.slots.push_back(slot);
    }
  }
  return rep;
}

}  // namespace loopforms
