#include "loopforms/ratmat.hpp"

#include <stdexcept>

namespace loopforms {

RatMatrix RatMatrix::identity(int n) {
  RatMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("ratmat mul: shape mismatch");
  RatMatrix r(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const Rat& aik = a.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols_; ++j) {
        if (b.at(k, j) == 0) continue;
        r.at(i, j) += aik * b.at(k, j);
      }
    }
  return r;
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("ratmat add: shape");
  RatMatrix r(a.rows_, a.cols_);
  for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
  return r;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("ratmat sub: shape");
  RatMatrix r(a.rows_, a.cols_);
  for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] - b.e_[i];
  return r;
}

RatMatrix RatMatrix::operator*(const Rat& c) const {
  RatMatrix r(rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] * c;
  return r;
}

RatMatrix RatMatrix::operator-() const {
  RatMatrix r(rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = -e_[i];
  return r;
}

bool RatMatrix::is_zero() const {
  for (const Rat& v : e_)
    if (v != 0) return false;
  return true;
}

RatMatrix RatMatrix::transposed() const {
  RatMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

namespace {

// fraction-free Bareiss elimination on an integer copy; returns the rank
int bareiss_rank(std::vector<mpz_class> m, int rows, int cols) {
  auto at = [&](int i, int j) -> mpz_class& { return m[size_t(i) * size_t(cols) + size_t(j)]; };
  mpz_class prev = 1;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (at(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (int j = 0; j < cols; ++j) std::swap(at(pivot, j), at(rank, j));
    for (int r = rank + 1; r < rows; ++r) {
      for (int j = col + 1; j < cols; ++j) {
        mpz_class v = at(rank, col) * at(r, j) - at(r, col) * at(rank, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        at(r, j) = v;
      }
      at(r, col) = 0;
    }
    prev = at(rank, col);
    ++rank;
  }
  return rank;
}

}  // namespace

int RatMatrix::rank() const {
  if (rows_ == 0 || cols_ == 0) return 0;
  // clear denominators row by row; rank is unchanged
  std::vector<mpz_class> m(e_.size());
  for (int i = 0; i < rows_; ++i) {
    mpz_class lcm = 1;
    for (int j = 0; j < cols_; ++j) {
      const Rat& q = at(i, j);
      if (q != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
    }
    for (int j = 0; j < cols_; ++j) {
      const Rat& q = at(i, j);
      m[size_t(i) * size_t(cols_) + size_t(j)] = q.get_num() * (lcm / q.get_den());
    }
  }
  return bareiss_rank(std::move(m), rows_, cols_);
}

namespace {

// reduced row echelon form over Q; returns pivot columns
std::vector<int> rref(RatMatrix& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int pivot = -1;
    for (int r = row; r < m.rows(); ++r)
      if (m.at(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m.at(pivot, j), m.at(row, j));
    Rat inv = Rat(1) / m.at(row, col);
    for (int j = col; j < m.cols(); ++j) m.at(row, j) *= inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || m.at(r, col) == 0) continue;
      Rat f = m.at(r, col);
      for (int j = col; j < m.cols(); ++j) m.at(r, j) -= f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

RatMatrix RatMatrix::kernel_basis() const {
  RatMatrix m = *this;
  std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(static_cast<size_t>(cols_), false);
  for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;
  int nfree = cols_ - static_cast<int>(pivots.size());
  RatMatrix ker(cols_, nfree);
  int kcol = 0;
  for (int free = 0; free < cols_; ++free) {
    if (is_pivot[static_cast<size_t>(free)]) continue;
    ker.at(free, kcol) = 1;
    for (size_t pr = 0; pr < pivots.size(); ++pr)
      ker.at(pivots[pr], kcol) = -m.at(static_cast<int>(pr), free);
    ++kcol;
  }
  return ker;
}

std::optional<std::vector<Rat>> RatMatrix::solve(const std::vector<Rat>& b) const {
  if (static_cast<int>(b.size()) != rows_) throw std::invalid_argument("solve: rhs size");
  RatMatrix aug(rows_, cols_ + 1);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
    aug.at(i, cols_) = b[static_cast<size_t>(i)];
  }
  std::vector<int> pivots = rref(aug);
  for (int p : pivots)
    if (p == cols_) return std::nullopt;  // inconsistent
  std::vector<Rat> x(static_cast<size_t>(cols_), Rat(0));
  for (size_t pr = 0; pr < pivots.size(); ++pr)
    x[static_cast<size_t>(pivots[pr])] = aug.at(static_cast<int>(pr), cols_);
  return x;
}

}  // namespace loopforms
