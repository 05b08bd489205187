#include "loopforms/context.hpp"

namespace loopforms {

std::shared_ptr<const Context> Context::make(std::vector<VarSpec> vars) {
  auto ctx = std::shared_ptr<Context>(new Context());
  ctx->vars_ = std::move(vars);
  for (VarId v = 0; v < ctx->size(); ++v) {
    const VarSpec& s = ctx->vars_[static_cast<size_t>(v)];
    if (s.name.empty()) throw ContextError("variable with empty name");
    if (!ctx->by_name_.emplace(s.name, v).second)
      throw ContextError("duplicate variable name: " + s.name);
    if (s.nil_cap && *s.nil_cap <= 0)
      throw ContextError("nil_cap must be positive for " + s.name);
    if (s.laurent) {
      if (s.parity == Parity::Odd) throw ContextError("laurent variable must be even: " + s.name);
      if (s.nil_cap) throw ContextError("laurent variable cannot be capped: " + s.name);
    }
  }
  for (VarId v = 0; v < ctx->size(); ++v)
    if (ctx->parity(v) == Parity::Even) ctx->canonical_.push_back(v);
  for (VarId v = 0; v < ctx->size(); ++v)
    if (ctx->parity(v) == Parity::Odd) ctx->canonical_.push_back(v);
  int bound = 0;
  for (VarId v = 0; v < ctx->size(); ++v) {
    int cap = ctx->effective_cap(v);
    if (cap > 0) bound += cap - 1;
  }
  ctx->nil_bound_ = bound;
  return ctx;
}

int Context::effective_cap(VarId v) const {
  const VarSpec& s = var(v);
  if (s.parity == Parity::Odd) return s.nil_cap ? std::min(*s.nil_cap, 2) : 2;
  return s.nil_cap.value_or(0);
}

std::optional<VarId> Context::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

VarId Context::require(std::string_view name) const {
  auto v = find(name);
  if (!v) throw ContextError("unknown variable: " + std::string(name));
  return *v;
}

void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* where) {
  if (!same_context(a, b))
    throw ContextError(std::string(where) + ": operands live in different contexts");
}

}  // namespace loopforms
