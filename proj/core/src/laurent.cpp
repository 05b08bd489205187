#include "loopforms/laurent.hpp"

#include <sstream>

namespace loopforms {

namespace {
constexpr int kInf = 1 << 29;
}

NilLaurent NilLaurent::term(ContextPtr ctx, int n, SuperPoly c) {
  NilLaurent s(std::move(ctx));
  s.add_term(n, c);
  return s;
}

void NilLaurent::add_term(int n, const SuperPoly& c) {
  if (!ctx_) ctx_ = c.context();
  require_same_context(ctx_, c.context(), "laurent coefficient");
  if (valid_to_ && n > *valid_to_) return;
  auto it = terms_.find(n);
  if (it == terms_.end()) {
    if (!c.is_zero()) terms_.emplace(n, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void NilLaurent::set_valid_to(std::optional<int> k) {
  valid_to_ = k;
  drop_invalid();
}

void NilLaurent::drop_invalid() {
  if (!valid_to_) return;
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->first > *valid_to_ ? terms_.erase(it) : std::next(it);
}

SuperPoly NilLaurent::coefficient(int n) const {
  if (!covers(n))
    throw WindowError("coefficient of t^" + std::to_string(n) +
                      " lies beyond the validity window (valid to t^" +
                      std::to_string(*valid_to_) + ")");
  auto it = terms_.find(n);
  return it == terms_.end() ? SuperPoly::zero(ctx_) : it->second;
}

int NilLaurent::min_exp_bound() const {
  if (!terms_.empty()) return terms_.begin()->first;
  if (valid_to_) return *valid_to_ + 1;  // zero so far, unknown tail above
  return kInf;                           // exactly zero
}

NilLaurent NilLaurent::operator-() const {
  NilLaurent r = *this;
  for (auto& [n, c] : r.terms_) c = -c;
  return r;
}

NilLaurent operator+(const NilLaurent& a, const NilLaurent& b) {
  NilLaurent r = a;
  if (!r.ctx_) r.ctx_ = b.ctx_;
  if (b.valid_to_) r.valid_to_ = r.valid_to_ ? std::min(*r.valid_to_, *b.valid_to_) : b.valid_to_;
  r.drop_invalid();
  for (const auto& [n, c] : b.terms_) r.add_term(n, c);
  return r;
}

NilLaurent operator-(const NilLaurent& a, const NilLaurent& b) { return a + (-b); }

NilLaurent operator*(const NilLaurent& a, const NilLaurent& b) {
  NilLaurent r(a.ctx_ ? a.ctx_ : b.ctx_);
  // validity of the product from the reach of each factor
  long valid = kInf;
  if (a.valid_to_) valid = std::min<long>(valid, long(*a.valid_to_) + b.min_exp_bound());
  if (b.valid_to_) valid = std::min<long>(valid, long(*b.valid_to_) + a.min_exp_bound());
  if (valid < kInf / 2) r.valid_to_ = static_cast<int>(valid);
  for (const auto& [n, cn] : a.terms_)
    for (const auto& [m, cm] : b.terms_) r.add_term(n + m, cn * cm);
  return r;
}

NilLaurent NilLaurent::operator*(const SuperPoly& c) const {
  NilLaurent r(ctx_);
  r.valid_to_ = valid_to_;
  for (const auto& [n, cn] : terms_) r.add_term(n, cn * c);
  return r;
}

NilLaurent NilLaurent::operator*(const Rat& c) const {
  NilLaurent r(ctx_);
  r.valid_to_ = valid_to_;
  for (const auto& [n, cn] : terms_) r.add_term(n, cn * c);
  return r;
}

bool NilLaurent::operator==(const NilLaurent& o) const {
  return terms_ == o.terms_ && valid_to_ == o.valid_to_;
}

NilLaurent NilLaurent::ddt() const {
  NilLaurent r(ctx_);
  if (valid_to_) r.valid_to_ = *valid_to_ - 1;
  for (const auto& [n, c] : terms_)
    if (n != 0) r.add_term(n - 1, c * Rat(n));
  return r;
}

NilLaurent NilLaurent::truncated(int k) const {
  NilLaurent r = *this;
  r.set_valid_to(valid_to_ ? std::min(*valid_to_, k) : k);
  return r;
}

NilLaurent NilLaurent::parity_twisted() const {
  NilLaurent r(ctx_);
  r.valid_to_ = valid_to_;
  for (const auto& [n, c] : terms_) r.add_term(n, c.parity_twisted());
  return r;
}

std::string NilLaurent::to_string(const std::string& var) const {
  if (terms_.empty() && !valid_to_) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [n, c] : terms_) {
    if (!first) os << " + ";
    os << "(" << c.to_string() << ")";
    if (n != 0) os << "*" << var << "^" << n;
    first = false;
  }
  if (first) os << "0";
  if (valid_to_) os << " + O(" << var << "^" << (*valid_to_ + 1) << ")";
  return os.str();
}

}  // namespace loopforms
