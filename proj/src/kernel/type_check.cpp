#include "casbridge/kernel/type_check.hpp"

#include <algorithm>
#include <functional>

#include "casbridge/kernel/printer.hpp"

namespace casbridge::kernel {

namespace {

std::string show(const Expr& e) { return print_raw(e); }

Level sort_max(const Level& a, const Level& b) {
  if (a.is_param()) return a;
  if (b.is_param()) return b;
  return Level::of(std::max(a.lit, b.lit));
}

}  // namespace

Expr TypeChecker::whnf(const Expr& e) {
  Expr cur = e;
  while (true) {
    if (cur.kind() == ExprKind::Let) {
      cur = instantiate(cur.body(), cur.value());
      continue;
    }
    const Expr& head = app_fn(cur);
    if (head.kind() == ExprKind::Lam && cur.is_app()) {
      auto args = app_args(cur);
      Expr f = head;
      std::size_t i = 0;
      while (f.kind() == ExprKind::Lam && i < args.size()) f = instantiate(f.body(), args[i++]);
      std::vector<Expr> rest(args.begin() + static_cast<std::ptrdiff_t>(i), args.end());
      cur = mk_app(f, rest);
      continue;
    }
    if (head.is_const()) {
      const Declaration* d = env_.find(head.name());
      if (d && d->kind == DeclKind::Definition && d->value) {
        cur = mk_app(*d->value, app_args(cur));
        continue;
      }
    }
    return cur;
  }
}

bool TypeChecker::is_def_eq(const Expr& a, const Expr& b) { return def_eq_core(a, b, 0); }

bool TypeChecker::def_eq_core(const Expr& a, const Expr& b, int depth) {
  if (depth > 512) return false;
  if (alpha_equal(a, b)) return true;
  Expr x = whnf(a);
  Expr y = whnf(b);
  if (alpha_equal(x, y)) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case ExprKind::Sort: return x.level() == y.level();
    case ExprKind::Const: return x.name() == y.name();
    case ExprKind::Local:
    case ExprKind::MVar: return x.name() == y.name();
    case ExprKind::Var: return x.var_index() == y.var_index();
    case ExprKind::App: {
      auto xa = app_args(x);
      auto ya = app_args(y);
      if (xa.size() != ya.size() || !def_eq_core(app_fn(x), app_fn(y), depth + 1)) return false;
      for (std::size_t i = 0; i < xa.size(); ++i) {
        if (!def_eq_core(xa[i], ya[i], depth + 1)) return false;
      }
      return true;
    }
    case ExprKind::Lam:
    case ExprKind::Pi: {
      if (!def_eq_core(x.type(), y.type(), depth + 1)) return false;
      Expr l = mk_local(fresh_unique_name(), x.name(), x.binder_info(), x.type());
      return def_eq_core(instantiate(x.body(), l), instantiate(y.body(), l), depth + 1);
    }
    default: return false;
  }
}

Expr TypeChecker::ensure_sort(const Expr& t, const Expr& ctx) {
  Expr w = whnf(t);
  if (w.kind() != ExprKind::Sort) throw TypeError("expected a type, got " + show(t) + " in " + show(ctx));
  return w;
}

Expr TypeChecker::ensure_pi(const Expr& t, const Expr& ctx) {
  Expr w = whnf(t);
  if (w.kind() != ExprKind::Pi) throw TypeError("function expected in " + show(ctx) + ", its type is " + show(t));
  return w;
}

Expr TypeChecker::infer(const Expr& e) {
  if (!e) throw TypeError("null expression");
  switch (e.kind()) {
    case ExprKind::Var: throw TypeError("loose bound variable #" + std::to_string(e.var_index()));
    case ExprKind::Sort:
      if (e.level().is_param()) return e;
      return mk_sort(Level::of(e.level().lit + 1));
    case ExprKind::Const: {
      const Declaration* d = env_.find(e.name());
      if (!d) throw TypeError("unknown constant " + e.name().str());
      return d->type;
    }
    case ExprKind::Local:
    case ExprKind::MVar: return e.type();
    case ExprKind::App: {
      Expr fty = ensure_pi(infer(e.fn()), e);
      Expr aty = infer(e.arg());
      if (!is_def_eq(aty, fty.type())) {
        throw TypeError("argument " + show(e.arg()) + " has type " + show(aty) + " but " + show(e.fn()) +
                        " expects " + show(fty.type()));
      }
      return instantiate(fty.body(), e.arg());
    }
    case ExprKind::Lam: {
      ensure_sort(infer(e.type()), e);
      Expr l = mk_local(fresh_unique_name(), e.name(), e.binder_info(), e.type());
      Expr bty = infer(instantiate(e.body(), l));
      return mk_pi(e.name(), e.binder_info(), e.type(), abstract(bty, l));
    }
    case ExprKind::Pi: {
      Expr s1 = ensure_sort(infer(e.type()), e);
      Expr l = mk_local(fresh_unique_name(), e.name(), e.binder_info(), e.type());
      Expr s2 = ensure_sort(infer(instantiate(e.body(), l)), e);
      if (!s2.level().is_param() && s2.level().lit == 0) return mk_prop();
      return mk_sort(sort_max(s1.level(), s2.level()));
    }
    case ExprKind::Let: {
      ensure_sort(infer(e.type()), e);
      check(e.value(), e.type());
      return infer(instantiate(e.body(), e.value()));
    }
    case ExprKind::NatLit:
    case ExprKind::Placeholder: throw TypeError("pre-expression node in kernel term");
  }
  throw TypeError("unreachable");
}

void TypeChecker::check(const Expr& e, const Expr& expected) {
  Expr t = infer(e);
  if (!is_def_eq(t, expected)) {
    throw TypeError(show(e) + " has type " + show(t) + " but is expected to have type " + show(expected));
  }
}

bool TypeChecker::is_proof(const Expr& e) {
  Expr s = whnf(infer(infer(e)));
  return s.kind() == ExprKind::Sort && !s.level().is_param() && s.level().lit == 0;
}

Expr type_check(const Environment& env, const Expr& e) { return TypeChecker(env).infer(e); }

namespace {

Expr head_beta(const Expr& e) {
  Expr head = app_fn(e);
  if (head.kind() != ExprKind::Lam || !e.is_app()) return e;
  auto args = app_args(e);
  std::size_t i = 0;
  while (head.kind() == ExprKind::Lam && i < args.size()) head = instantiate(head.body(), args[i++]);
  return head_beta(mk_app(head, std::vector<Expr>(args.begin() + static_cast<std::ptrdiff_t>(i), args.end())));
}

Expr rebuild(const Expr& e, const std::function<Expr(const Expr&)>& f) {
  switch (e.kind()) {
    case ExprKind::App: return mk_app(f(e.fn()), f(e.arg()));
    case ExprKind::Lam: return mk_lambda(e.name(), e.binder_info(), f(e.type()), f(e.body()));
    case ExprKind::Pi: return mk_pi(e.name(), e.binder_info(), f(e.type()), f(e.body()));
    case ExprKind::Let: return mk_let(e.name(), f(e.type()), f(e.value()), f(e.body()));
    case ExprKind::Local: return mk_local(e.name(), e.pretty_name(), e.binder_info(), f(e.type()));
    default: return e;
  }
}

}  // namespace

Expr beta_normalize(const Expr& e) {
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (x.kind() == ExprKind::Local) return x;
    return head_beta(rebuild(x, go));
  };
  return go(e);
}

Expr unfold_definitions(const Environment& env, const Expr& e, const std::vector<Name>& names) {
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (x.is_const() && std::find(names.begin(), names.end(), x.name()) != names.end()) {
      const Declaration& d = env.get(x.name());
      if (!d.value) throw TypeError(x.name().str() + " has no definition to unfold");
      return go(*d.value);
    }
    if (x.kind() == ExprKind::Local) return x;
    return rebuild(x, go);
  };
  return beta_normalize(go(e));
}

}  // namespace casbridge::kernel
