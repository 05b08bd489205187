#pragma once

#include "loopforms/ratmat.hpp"
#include "loopforms/rational.hpp"
#include "loopforms/context.hpp"

#include <string>
#include <vector>

namespace loopforms {

// Finite-dimensional local super-commutative algebra given by a graded
// basis (e_i) with e_0 = 1 and structure constants e_i e_j = sum c_{ij}^k e_k.
// Unit, super-commutativity, associativity, parity pattern and nilpotency
// of the augmentation ideal are all validated eagerly.
class LocalSuperAlgebra {
 public:
  static LocalSuperAlgebra from_table(std::vector<std::string> labels,
                                      std::vector<Parity> parities,
                                      std::vector<std::vector<std::vector<Rat>>> c);

  // Q[t]/t^d with basis 1, t, ..., t^{d-1}
  static LocalSuperAlgebra truncated_polynomial(int d);
  // exterior algebra on n odd generators, basis = subsets by (size, lex)
  static LocalSuperAlgebra exterior(int n);

  int dim() const { return static_cast<int>(parities_.size()); }
  Parity parity(int i) const { return parities_.at(static_cast<size_t>(i)); }
  const std::string& label(int i) const { return labels_.at(static_cast<size_t>(i)); }
  const Rat& c(int i, int j, int k) const;

  // product of coefficient vectors
  std::vector<Rat> mul(const std::vector<Rat>& a, const std::vector<Rat>& b) const;

  bool is_derivation(const RatMatrix& action, Parity p, std::string* why = nullptr) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Parity> parities_;
  std::vector<std::vector<std::vector<Rat>>> c_;
};

// A named derivation of a local super-algebra, stored as its action matrix:
// column i holds the coefficients of delta(e_i).
struct AlgDerivation {
  std::string label;
  Parity parity = Parity::Even;
  RatMatrix action;
};

// Bracket normalized so that the grading operator Theta = eta d/deta
// satisfies [Theta, D] = D against D = d/deta; this is the negative of the
// plain operator commutator and matches the induced action on near-point
// coordinates.
AlgDerivation alg_bracket(const LocalSuperAlgebra& o, const AlgDerivation& a,
                          const AlgDerivation& b);

// Derivation of an exterior algebra from the images of its generators.
AlgDerivation exterior_derivation(const LocalSuperAlgebra& o, int n, const std::string& label,
                                  Parity parity, const std::vector<std::vector<Rat>>& gen_images);

// N=1: {D, Theta} on Lambda[eta]. N=2: {D1, D2, D1*, D2*, Theta1, Theta2,
// E, F} on Lambda[eta1, eta2].
std::vector<AlgDerivation> der_o_basis(int N);

}  // namespace loopforms
