#include "casbridge/cas/match.hpp"

namespace casbridge::cas {

namespace {

bool blank_accepts(const Expr& blank, const Expr& e) {
  if (blank.arity() == 0) return true;
  const Expr& h = blank.arg(0);
  if (h.is_sym("Integer")) return e.is_int();
  if (h.is_sym("Real")) return e.is_real();
  if (h.is_sym("String")) return e.is_str();
  if (h.is_sym("Symbol")) return e.is_sym();
  return e.is_app() && e.head() == h;
}

}  // namespace

bool is_pattern(const Expr& e) {
  if (e.is_app("Blank") || e.is_app("Pattern", 2)) return true;
  if (!e.is_app()) return false;
  if (is_pattern(e.head())) return true;
  for (const auto& a : e.args()) {
    if (is_pattern(a)) return true;
  }
  return false;
}

bool match_into(const Expr& p, const Expr& e, Bindings& b) {
  if (p.is_app("Blank") && p.arity() <= 1) return blank_accepts(p, e);
  if (p.is_app("Pattern", 2) && p.arg(0).is_sym()) {
    if (!match_into(p.arg(1), e, b)) return false;
    auto [it, fresh] = b.emplace(p.arg(0).name(), e);
    return fresh || it->second == e;
  }
  if (!p.is_app()) return p == e;
  if (!e.is_app() || p.arity() != e.arity()) return false;
  if (!match_into(p.head(), e.head(), b)) return false;
  for (std::size_t i = 0; i < p.arity(); ++i) {
    if (!match_into(p.arg(i), e.arg(i), b)) return false;
  }
  return true;
}

std::optional<Bindings> match(const Expr& pattern, const Expr& e) {
  Bindings b;
  if (!match_into(pattern, e, b)) return std::nullopt;
  return b;
}

Expr substitute(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  if (e.is_sym()) {
    auto it = b.find(e.name());
    return it == b.end() ? e : it->second;
  }
  if (!e.is_app()) return e;
  bool changed = false;
  Expr h = substitute(e.head(), b);
  changed = h.raw() != e.head().raw();
  std::vector<Expr> args;
  args.reserve(e.arity());
  for (const auto& a : e.args()) {
    args.push_back(substitute(a, b));
    changed = changed || args.back().raw() != a.raw();
  }
  return changed ? app(h, std::move(args)) : e;
}

}  // namespace casbridge::cas
