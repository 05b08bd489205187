#include "loopforms/localalg.hpp"

#include <algorithm>
#include <functional>

#include "loopforms/superpoly.hpp"

namespace loopforms {

LocalSuperAlgebra LocalSuperAlgebra::from_table(std::vector<std::string> labels,
                                                std::vector<Parity> parities,
                                                std::vector<std::vector<std::vector<Rat>>> c) {
  LocalSuperAlgebra o;
  o.labels_ = std::move(labels);
  o.parities_ = std::move(parities);
  o.c_ = std::move(c);
  const int n = o.dim();
  if (n == 0 || static_cast<int>(o.labels_.size()) != n) throw AlgebraError("bad basis data");
  if (o.parities_[0] != Parity::Even) throw AlgebraError("e_0 must be even");

  auto check = [&](bool ok, const char* what) {
    if (!ok) throw AlgebraError(std::string("local algebra table: ") + what);
  };
  check(static_cast<int>(o.c_.size()) == n, "c tensor shape");
  for (int i = 0; i < n; ++i) {
    check(static_cast<int>(o.c_[i].size()) == n, "c tensor shape");
    for (int j = 0; j < n; ++j) check(static_cast<int>(o.c_[i][j].size()) == n, "c tensor shape");
  }
  // unit
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      check(o.c(0, j, k) == (j == k ? 1 : 0), "e_0 is not a left unit");
      check(o.c(j, 0, k) == (j == k ? 1 : 0), "e_0 is not a right unit");
    }
  // parity pattern and super-commutativity
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (o.c(i, j, k) != 0)
          check(o.parity(k) == o.parity(i) + o.parity(j), "parity violation");
        int s = (parity_bit(o.parity(i)) && parity_bit(o.parity(j))) ? -1 : 1;
        check(o.c(i, j, k) == s * o.c(j, i, k), "not super-commutative");
      }
  // associativity: (e_i e_j) e_k = e_i (e_j e_k)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Rat lhs = 0, rhs = 0;
          for (int m = 0; m < n; ++m) {
            lhs += o.c(i, j, m) * o.c(m, k, l);
            rhs += o.c(j, k, m) * o.c(i, m, l);
          }
          check(lhs == rhs, "not associative");
        }
  // nilpotency of span(e_i, i != 0): iterate the ideal until it stabilizes
  {
    RatMatrix basis(n, n - 1);
    for (int i = 1; i < n; ++i) basis.at(i, i - 1) = 1;
    int prev_rank = basis.rank();
    for (int step = 0; step <= n + 1; ++step) {
      // span of products (ideal elements) x (maximal ideal generators)
      std::vector<std::vector<Rat>> prods;
      for (int col = 0; col < basis.cols(); ++col)
        for (int g = 1; g < n; ++g) {
          std::vector<Rat> v(static_cast<size_t>(n), Rat(0));
          for (int i = 0; i < n; ++i) {
            if (basis.at(i, col) == 0) continue;
            for (int k = 0; k < n; ++k) v[static_cast<size_t>(k)] += basis.at(i, col) * o.c(i, g, k);
          }
          prods.push_back(std::move(v));
        }
      RatMatrix next(n, static_cast<int>(prods.size()));
      for (int col = 0; col < next.cols(); ++col)
        for (int i = 0; i < n; ++i) next.at(i, col) = prods[static_cast<size_t>(col)][static_cast<size_t>(i)];
      int r = next.rank();
      if (r == 0) break;
      check(r < prev_rank, "augmentation ideal is not nilpotent");
      prev_rank = r;
      basis = std::move(next);
    }
  }
  return o;
}

const Rat& LocalSuperAlgebra::c(int i, int j, int k) const {
  return c_[static_cast<size_t>(i)][static_cast<size_t>(j)][static_cast<size_t>(k)];
}

std::vector<Rat> LocalSuperAlgebra::mul(const std::vector<Rat>& a, const std::vector<Rat>& b) const {
  const int n = dim();
  std::vector<Rat> r(static_cast<size_t>(n), Rat(0));
  for (int i = 0; i < n; ++i) {
    if (a[static_cast<size_t>(i)] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (b[static_cast<size_t>(j)] == 0) continue;
      for (int k = 0; k < n; ++k)
        r[static_cast<size_t>(k)] += a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)] * c(i, j, k);
    }
  }
  return r;
}

LocalSuperAlgebra LocalSuperAlgebra::truncated_polynomial(int d) {
  if (d < 1) throw AlgebraError("truncated_polynomial: need d >= 1");
  std::vector<std::string> labels;
  std::vector<Parity> parities(static_cast<size_t>(d), Parity::Even);
  for (int i = 0; i < d; ++i) labels.push_back(i == 0 ? "1" : "t^" + std::to_string(i));
  std::vector c(static_cast<size_t>(d),
                std::vector(static_cast<size_t>(d), std::vector(static_cast<size_t>(d), Rat(0))));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i + j < d) c[static_cast<size_t>(i)][static_cast<size_t>(j)][static_cast<size_t>(i + j)] = 1;
  return from_table(std::move(labels), std::move(parities), std::move(c));
}

namespace {

// subsets of {0..n-1} ordered by (size, lex); index 0 is the empty set
std::vector<std::vector<int>> subset_basis(int n) {
  std::vector<std::vector<int>> subsets;
  for (int size = 0; size <= n; ++size) {
    std::vector<std::vector<int>> level;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
      if (static_cast<int>(cur.size()) == size) {
        level.push_back(cur);
        return;
      }
      for (int v = start; v < n; ++v) {
        cur.push_back(v);
        rec(v + 1);
        cur.pop_back();
      }
    };
    rec(0);
    subsets.insert(subsets.end(), level.begin(), level.end());
  }
  return subsets;
}

// eta_S * eta_T -> (sign, S u T), zero on overlap
std::pair<int, std::vector<int>> subset_mul(const std::vector<int>& s, const std::vector<int>& t) {
  std::vector<int> merged = s;
  merged.insert(merged.end(), t.begin(), t.end());
  long inv = 0;
  for (size_t i = 0; i < merged.size(); ++i)
    for (size_t j = i + 1; j < merged.size(); ++j) {
      if (merged[i] == merged[j]) return {0, {}};
      if (merged[i] > merged[j]) ++inv;
    }
  std::sort(merged.begin(), merged.end());
  return {(inv & 1) ? -1 : 1, merged};
}

}  // namespace

LocalSuperAlgebra LocalSuperAlgebra::exterior(int n) {
  auto subsets = subset_basis(n);
  const int dim = static_cast<int>(subsets.size());
  std::vector<std::string> labels;
  std::vector<Parity> parities;
  for (const auto& s : subsets) {
    if (s.empty())
      labels.push_back("1");
    else {
      std::string l;
      for (int v : s) l += "eta" + std::to_string(v + 1);
      labels.push_back(l);
    }
    parities.push_back((s.size() & 1) ? Parity::Odd : Parity::Even);
  }
  std::vector c(static_cast<size_t>(dim),
                std::vector(static_cast<size_t>(dim), std::vector(static_cast<size_t>(dim), Rat(0))));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      auto [sign, merged] = subset_mul(subsets[static_cast<size_t>(i)], subsets[static_cast<size_t>(j)]);
      if (sign == 0) continue;
      auto it = std::find(subsets.begin(), subsets.end(), merged);
      int k = static_cast<int>(it - subsets.begin());
      c[static_cast<size_t>(i)][static_cast<size_t>(j)][static_cast<size_t>(k)] = sign;
    }
  return from_table(std::move(labels), std::move(parities), std::move(c));
}

bool LocalSuperAlgebra::is_derivation(const RatMatrix& action, Parity p, std::string* why) const {
  const int n = dim();
  if (action.rows() != n || action.cols() != n) {
    if (why) *why = "action matrix shape";
    return false;
  }
  // parity pattern of the matrix
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (action.at(k, i) != 0 && parity(k) != parity(i) + p) {
        if (why) *why = "matrix entries break parity";
        return false;
      }
  // Leibniz on all basis pairs: delta(e_i e_j) = delta(e_i) e_j + (-1)^{p |e_i|} e_i delta(e_j)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<Rat> lhs(static_cast<size_t>(n), Rat(0));
      for (int m = 0; m < n; ++m) {
        if (c(i, j, m) == 0) continue;
        for (int k = 0; k < n; ++k) lhs[static_cast<size_t>(k)] += c(i, j, m) * action.at(k, m);
      }
      std::vector<Rat> rhs(static_cast<size_t>(n), Rat(0));
      for (int k = 0; k < n; ++k) {
        if (action.at(k, i) != 0)
          for (int l = 0; l < n; ++l) rhs[static_cast<size_t>(l)] += action.at(k, i) * c(k, j, l);
      }
      int s = (parity_bit(p) && parity_bit(parity(i))) ? -1 : 1;
      for (int k = 0; k < n; ++k) {
        if (action.at(k, j) != 0)
          for (int l = 0; l < n; ++l)
            rhs[static_cast<size_t>(l)] += Rat(s) * action.at(k, j) * c(i, k, l);
      }
      if (lhs != rhs) {
        if (why) *why = "Leibniz fails on basis pair (" + label(i) + ", " + label(j) + ")";
        return false;
      }
    }
  return true;
}

AlgDerivation alg_bracket(const LocalSuperAlgebra& o, const AlgDerivation& a,
                          const AlgDerivation& b) {
  int s = (parity_bit(a.parity) && parity_bit(b.parity)) ? -1 : 1;
  RatMatrix m = (a.action * b.action - (b.action * a.action) * Rat(s)) * Rat(-1);
  return AlgDerivation{"[" + a.label + "," + b.label + "]", a.parity + b.parity, std::move(m)};
}

AlgDerivation exterior_derivation(const LocalSuperAlgebra& o, int n, const std::string& label,
                                  Parity parity, const std::vector<std::vector<Rat>>& gen_images) {
  auto subsets = subset_basis(n);
  const int dim = o.dim();
  RatMatrix action(dim, dim);
  // delta(eta_S) by the Leibniz rule, left to right
  for (int col = 0; col < dim; ++col) {
    const auto& S = subsets[static_cast<size_t>(col)];
    for (size_t pos = 0; pos < S.size(); ++pos) {
      // prefix sign: delta jumps over pos odd generators
      int sign = (parity_bit(parity) && (pos & 1)) ? -1 : 1;
      // term eta_{S<pos} * delta(eta_{S[pos]}) * eta_{S>pos}
      const std::vector<Rat>& img = gen_images[static_cast<size_t>(S[pos])];
      for (int bi = 0; bi < dim; ++bi) {
        if (img[static_cast<size_t>(bi)] == 0) continue;
        // multiply eta_{prefix} * e_bi * eta_{suffix} in the algebra
        std::vector<int> prefix(S.begin(), S.begin() + static_cast<long>(pos));
        auto idx_of = [&](const std::vector<int>& s) {
          return static_cast<int>(std::find(subsets.begin(), subsets.end(), s) - subsets.begin());
        };
        std::vector<Rat> cur(static_cast<size_t>(dim), Rat(0));
        cur[static_cast<size_t>(idx_of(prefix))] = img[static_cast<size_t>(bi)] * sign;
        std::vector<Rat> ebi(static_cast<size_t>(dim), Rat(0));
        ebi[static_cast<size_t>(bi)] = 1;
        cur = o.mul(cur, ebi);
        std::vector<int> suffix(S.begin() + static_cast<long>(pos) + 1, S.end());
        std::vector<Rat> esuf(static_cast<size_t>(dim), Rat(0));
        esuf[static_cast<size_t>(idx_of(suffix))] = 1;
        cur = o.mul(cur, esuf);
        for (int k = 0; k < dim; ++k) action.at(k, col) += cur[static_cast<size_t>(k)];
      }
    }
  }
  AlgDerivation d{label, parity, std::move(action)};
  std::string why;
  if (!o.is_derivation(d.action, d.parity, &why))
    throw AlgebraError("exterior_derivation " + label + ": " + why);
  return d;
}

std::vector<AlgDerivation> der_o_basis(int N) {
  if (N == 1) {
    LocalSuperAlgebra o = LocalSuperAlgebra::exterior(1);
    // D = d/deta, Theta = eta d/deta
    AlgDerivation D = exterior_derivation(o, 1, "D", Parity::Odd, {{Rat(1), Rat(0)}});
    AlgDerivation Th = exterior_derivation(o, 1, "Theta", Parity::Even, {{Rat(0), Rat(1)}});
    return {D, Th};
  }
  if (N != 2) throw AlgebraError("der_o_basis: N must be 1 or 2");
  LocalSuperAlgebra o = LocalSuperAlgebra::exterior(2);
  const int dim = o.dim();  // basis 1, eta1, eta2, eta1 eta2
  auto vec = [&](std::initializer_list<Rat> vals) {
    std::vector<Rat> v(vals);
    v.resize(static_cast<size_t>(dim), Rat(0));
    return v;
  };
  std::vector<Rat> zero = vec({});
  std::vector<Rat> one = vec({Rat(1)});
  std::vector<Rat> eta1 = vec({Rat(0), Rat(1)});
  std::vector<Rat> eta2 = vec({Rat(0), Rat(0), Rat(1)});
  std::vector<Rat> eta12 = vec({Rat(0), Rat(0), Rat(0), Rat(1)});
  std::vector<Rat> meta12 = vec({Rat(0), Rat(0), Rat(0), Rat(-1)});

  // The homotopies are normalized by the relations [D1, D1*] = Theta2 and
  // [D2, D2*] = Theta1: D1* = eta2 eta1 d/deta2, D2* = eta1 eta2 d/deta1.
  std::vector<AlgDerivation> basis;
  basis.push_back(exterior_derivation(o, 2, "D1", Parity::Odd, {one, zero}));
  basis.push_back(exterior_derivation(o, 2, "D2", Parity::Odd, {zero, one}));
  basis.push_back(exterior_derivation(o, 2, "D1*", Parity::Odd, {zero, meta12}));
  basis.push_back(exterior_derivation(o, 2, "D2*", Parity::Odd, {eta12, zero}));
  basis.push_back(exterior_derivation(o, 2, "Theta1", Parity::Even, {eta1, zero}));
  basis.push_back(exterior_derivation(o, 2, "Theta2", Parity::Even, {zero, eta2}));
  basis.push_back(exterior_derivation(o, 2, "E", Parity::Even, {zero, eta1}));
  basis.push_back(exterior_derivation(o, 2, "F", Parity::Even, {eta2, zero}));
  return basis;
}

}  // namespace loopforms
