#pragma once

// Node layout and template helpers for expr.hpp. Not meant to be included directly.

namespace casbridge::kernel {
namespace detail {

struct ExprNode {
  ExprKind kind = ExprKind::Var;
  std::uint64_t index = 0;
  Level level;
  Name name;
  Name pretty;
  std::vector<Level> levels;
  BinderInfo binfo = BinderInfo::Default;
  mpz_class nat;
  // MVar/Local: a = type. App: a = fn, b = arg.
  // Lam/Pi: a = binder type, b = body. Let: a = type, b = body, c = value.
  Expr a, b, c;

  std::uint64_t loose_range = 0;
  std::size_t size = 1;
  bool has_local = false;
  bool has_mvar = false;
  bool is_pre = false;
};

}  // namespace detail

template <typename F>
void for_each(const Expr& e, F&& f) {
  std::vector<const Expr*> stack{&e};
  while (!stack.empty()) {
    const Expr* cur = stack.back();
    stack.pop_back();
    if (cur->is_null() || !f(*cur)) continue;
    const auto* n = cur->raw();
    if (n->c) stack.push_back(&n->c);
    if (n->b) stack.push_back(&n->b);
    if (n->a) stack.push_back(&n->a);
  }
}

}  // namespace casbridge::kernel
