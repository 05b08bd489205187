#pragma once

#include "loopforms/rational.hpp"

#include <optional>
#include <vector>

namespace loopforms {

// Dense exact-rational matrix; just enough linear algebra for rank,
// kernel and solve, all exact.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(size_t(rows) * size_t(cols), Rat(0)) {}

  static RatMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Rat& at(int i, int j) const { return e_[size_t(i) * size_t(cols_) + size_t(j)]; }
  Rat& at(int i, int j) { return e_[size_t(i) * size_t(cols_) + size_t(j)]; }

  friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
  friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
  friend RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
  RatMatrix operator*(const Rat& c) const;
  RatMatrix operator-() const;
  bool operator==(const RatMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_; }
  bool is_zero() const;

  RatMatrix transposed() const;

  // exact rank via fraction-free elimination on the cleared integer matrix
  int rank() const;
  // basis of the right kernel, one column per basis vector
  RatMatrix kernel_basis() const;

  // solves A x = b exactly; nullopt when inconsistent
  std::optional<std::vector<Rat>> solve(const std::vector<Rat>& b) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rat> e_;
};

}  // namespace loopforms
