#pragma once

#include "loopforms/ratmat.hpp"
#include "loopforms/weil.hpp"

#include <map>
#include <string>

namespace loopforms {

struct SliceCaps {
  int imax = 4;
  int jmax = 4;
  int internal_cap = 4;  // max total degree in the 0-modes x[0]
  int max_basis = 200000;
};

// Finite window of the double complex Omega^{..}(A), realized as the
// near-point context of A for o = Lambda[eta1, eta2]. Basis monomials at
// bidegree (i,j) are the eigenvectors of Theta1, Theta2 with eigenvalues
// i, j whose 0-mode degree stays within the cap.
class BigradedSlice {
 public:
  static BigradedSlice build(ContextPtr base, SliceCaps caps);

  const WeilContextPtr& weil() const { return wc_; }
  const SliceCaps& caps() const { return caps_; }

  const std::vector<Monomial>& basis(int i, int j) const;
  int dim(int i, int j) const { return static_cast<int>(basis(i, j).size()); }

  // Euler weight = total degree in all near-point generators; every
  // operator in the game preserves it.
  std::vector<int> weights(int i, int j) const;
  std::vector<int> stratum(int i, int j, int w) const;
  // a stratum is free of cap truncation iff w - max(i,j) <= internal_cap
  bool stratum_complete(int i, int j, int w) const;

  const Derivation& op(const std::string& label) const;
  std::pair<int, int> op_shift(const std::string& label) const;

  // full matrix (columns = source basis) into the (i2,j2) basis
  RatMatrix matrix_of(const std::string& label, int i, int j) const;
  // restriction to one weight stratum
  RatMatrix matrix_on_stratum(const std::string& label, int i, int j, int w) const;

  int internal_degree(const Monomial& m) const;  // degree in the 0-modes

 private:
  WeilContextPtr wc_;
  SliceCaps caps_;
  std::map<std::pair<int, int>, std::vector<Monomial>> bases_;
  std::map<std::pair<int, int>, std::map<Monomial, int>> index_;
  std::map<std::string, Derivation> ops_;
  std::map<std::string, std::pair<int, int>> shifts_;
};

struct ExactnessPosition {
  int position = 0;        // i along the row (or j along the column)
  int dimension = 0;
  int dim_kernel = 0;      // of the outgoing differential
  int dim_image_prev = 0;  // of the incoming differential
  int defect = 0;          // dim_kernel - dim_image_prev
  bool verifiable = false; // kernel computable inside the window
  bool homotopy_identity = false;  // D D* + D* D = (row index) at this position
};

struct ExactnessReport {
  int row = 0;
  std::string differential;  // "D1" rows, "D2" columns
  std::vector<ExactnessPosition> positions;
  bool interior_exact = true;  // defect 0 at every verifiable position (rows j >= 1)
};

// Exactness of row j under D1 (or column j under D2), with exact ranks.
ExactnessReport row_exactness_report(const BigradedSlice& slice, int row,
                                     const std::string& differential);

struct CohomologySlot {
  int q = 0;       // complex slot
  int weight = 0;  // Euler weight stratum
  int left_dim = 0;
  int right_dim = 0;
  bool comparable = false;  // both sides free of truncation effects
  bool equal = false;
};

struct TruncationCompareReport {
  int p = 0;
  std::vector<CohomologySlot> slots;
  bool all_comparable_equal = true;
};

// Compares the cohomology of (ker D1 in the p-th column row, D2) with the
// cohomological truncation [ker D2 -> V^{0,p} -> V^{0,p+1} -> ...],
// dimension tables per (slot, weight).
TruncationCompareReport truncation_cohomology_compare(const ContextPtr& base, int p,
                                                      const SliceCaps& caps);

}  // namespace loopforms
