#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace loopforms {

enum class Parity : unsigned char { Even = 0, Odd = 1 };

inline Parity operator+(Parity a, Parity b) {
  return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) & 1);
}
inline int parity_bit(Parity p) { return static_cast<int>(p); }

struct ContextError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One generator of a Z/2-graded polynomial ring.
//
// nil_cap e means x^e = 0; odd variables are implicitly capped at 2.
// A laurent variable is even, uncapped and formally invertible: its
// exponents range over all of Z.
struct VarSpec {
  std::string name;
  Parity parity = Parity::Even;
  std::optional<int> nil_cap;
  bool laurent = false;
};

using VarId = int;

// Immutable set of generators. sort_key is the declaration index; the
// canonical factor order within a monomial is all even variables first,
// then all odd ones, each group by declaration index.
class Context {
 public:
  static std::shared_ptr<const Context> make(std::vector<VarSpec> vars);

  int size() const { return static_cast<int>(vars_.size()); }
  const VarSpec& var(VarId v) const { return vars_.at(static_cast<size_t>(v)); }
  Parity parity(VarId v) const { return var(v).parity; }
  bool is_laurent(VarId v) const { return var(v).laurent; }

  // 0 means "no cap"; odd variables report at most 2.
  int effective_cap(VarId v) const;

  std::optional<VarId> find(std::string_view name) const;
  VarId require(std::string_view name) const;

  // evens before odds, then declaration order
  const std::vector<VarId>& canonical_order() const { return canonical_; }

  // Upper bound on the total degree of a nonzero product of nilpotent
  // generators: sum of (cap-1) over capped evens plus the odd count.
  int nilpotent_degree_bound() const { return nil_bound_; }

 private:
  Context() = default;
  std::vector<VarSpec> vars_;
  std::unordered_map<std::string, VarId> by_name_;
  std::vector<VarId> canonical_;
  int nil_bound_ = 0;
};

using ContextPtr = std::shared_ptr<const Context>;

inline bool same_context(const ContextPtr& a, const ContextPtr& b) { return a.get() == b.get(); }

void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* where);

}  // namespace loopforms
