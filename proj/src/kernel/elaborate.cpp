#include "casbridge/kernel/elaborate.hpp"

#include <functional>
#include <map>
#include <set>

#include "casbridge/kernel/numeral.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/type_check.hpp"

namespace casbridge::kernel {

namespace {

constexpr const char* kMetaPrefix = "_elab";

class Elaborator {
 public:
  Elaborator(const Environment& env, const ElabOptions& opts) : env_(env), opts_(opts), tc_(env) {}

  std::pair<Expr, Expr> run(const Expr& pre, const std::optional<Expr>& expected) {
    std::optional<Expr> exp;
    if (expected) exp = *expected;
    auto [term, type] = elab(pre, exp);
    if (expected && !unify(type, *expected)) {
      throw TypeMismatch(print_raw(instantiate_mvars(term)) + " has type " + print_raw(instantiate_mvars(type)) +
                         " but is expected to have type " + print_raw(*expected));
    }
    resolve_instances(false);
    for (const auto& m : numeral_types_) {
      // The carrier may have been unified with another metavariable.
      Expr c = instantiate_mvars(m);
      if (c.kind() == ExprKind::MVar && !assignment_.count(c.name())) assignment_[c.name()] = mk_const(opts_.default_numeral_type);
    }
    resolve_instances(true);
    term = instantiate_mvars(term);
    if (term.has_mvars()) {
      Expr stuck;
      for_each(term, [&](const Expr& x) {
        if (!stuck && x.kind() == ExprKind::MVar && is_ours(x)) stuck = x;
        return !stuck;
      });
      if (stuck) {
        throw ElaborationFailure("unable to infer placeholder of type " + print_raw(instantiate_mvars(stuck.type())) +
                                 " in " + print_raw(term));
      }
    }
    Expr ty;
    try {
      ty = tc_.infer(term);
      if (expected && !tc_.is_def_eq(ty, *expected)) {
        throw TypeMismatch(print_raw(term) + " : " + print_raw(ty) + " does not match " + print_raw(*expected));
      }
    } catch (const TypeError& e) {
      throw TypeMismatch(e.detail());
    }
    return {term, ty};
  }

 private:
  static bool is_ours(const Expr& m) {
    return m.kind() == ExprKind::MVar && !m.name().empty() && m.name().components()[0] == kMetaPrefix;
  }

  Expr new_mvar(const Expr& type) {
    return mk_mvar(Name(std::vector<std::string>{kMetaPrefix, std::to_string(++counter_)}), type);
  }

  Expr instantiate_mvars(const Expr& e) {
    if (!e.has_mvars()) return e;
    if (e.kind() == ExprKind::MVar) {
      auto it = assignment_.find(e.name());
      if (it == assignment_.end()) return e;
      Expr v = instantiate_mvars(it->second);
      it->second = v;
      return v;
    }
    switch (e.kind()) {
      case ExprKind::App: return mk_app(instantiate_mvars(e.fn()), instantiate_mvars(e.arg()));
      case ExprKind::Lam: return mk_lambda(e.name(), e.binder_info(), instantiate_mvars(e.type()), instantiate_mvars(e.body()));
      case ExprKind::Pi: return mk_pi(e.name(), e.binder_info(), instantiate_mvars(e.type()), instantiate_mvars(e.body()));
      case ExprKind::Let:
        return mk_let(e.name(), instantiate_mvars(e.type()), instantiate_mvars(e.value()), instantiate_mvars(e.body()));
      case ExprKind::Local:
        return mk_local(e.name(), e.pretty_name(), e.binder_info(), instantiate_mvars(e.type()));
      default: return e;
    }
  }

  bool occurs(const Name& m, const Expr& e) {
    bool found = false;
    for_each(e, [&](const Expr& x) {
      if (found || !x.has_mvars()) return false;
      if (x.kind() == ExprKind::MVar && x.name() == m) found = true;
      return !found;
    });
    return found;
  }

  bool assign(const Expr& m, const Expr& v) {
    if (v.has_loose_bvars() || occurs(m.name(), v)) return false;
    assignment_[m.name()] = v;
    return true;
  }

  bool unify(const Expr& a0, const Expr& b0, int depth = 0) {
    if (depth > 256) return false;
    Expr a = instantiate_mvars(a0);
    Expr b = instantiate_mvars(b0);
    if (alpha_equal(a, b)) return true;
    if (is_ours(a)) return assign(a, b);
    if (is_ours(b)) return assign(b, a);
    if (a.kind() == b.kind()) {
      switch (a.kind()) {
        case ExprKind::App: {
          auto aa = app_args(a);
          auto ba = app_args(b);
          if (aa.size() == ba.size() && alpha_equal(app_fn(a), app_fn(b))) {
            bool ok = true;
            for (std::size_t i = 0; ok && i < aa.size(); ++i) ok = unify(aa[i], ba[i], depth + 1);
            if (ok) return true;
          }
          break;
        }
        case ExprKind::Lam:
        case ExprKind::Pi: {
          if (!unify(a.type(), b.type(), depth + 1)) return false;
          Expr l = mk_local(fresh_unique_name(), a.name(), a.binder_info(), instantiate_mvars(a.type()));
          return unify(instantiate(a.body(), l), instantiate(b.body(), l), depth + 1);
        }
        default: break;
      }
    }
    Expr wa = tc_.whnf(a);
    Expr wb = tc_.whnf(b);
    if (!alpha_equal(wa, a) || !alpha_equal(wb, b)) return unify(wa, wb, depth + 1);
    return false;
  }

  std::vector<Level> levels_for(const Declaration& d) const {
    return std::vector<Level>(d.univ_params.size(), Level::of(0));
  }

  /// Insert metavariables for leading implicit/instance binders of `type`.
  void insert_implicits(Expr& term, Expr& type) {
    while (true) {
      Expr t = tc_.whnf(instantiate_mvars(type));
      if (t.kind() != ExprKind::Pi || t.binder_info() == BinderInfo::Default) return;
      Expr m = new_mvar(t.type());
      if (t.binder_info() == BinderInfo::InstImplicit) pending_instances_.push_back(m);
      term = mk_app(term, m);
      type = instantiate(t.body(), m);
    }
  }

  Expr mk_inst_app(const char* head, const Expr& carrier, std::initializer_list<const char*> classes,
                   const std::vector<Expr>& rest) {
    Expr t = mk_app(mk_const(head, {Level::of(0)}), carrier);
    for (const char* cls : classes) {
      Expr m = new_mvar(mk_app(mk_const(cls, {Level::of(0)}), carrier));
      pending_instances_.push_back(m);
      t = mk_app(t, m);
    }
    return mk_app(t, rest);
  }

  Expr numeral_at(const mpz_class& n, const Expr& carrier) {
    if (n == 0) return mk_inst_app("zero", carrier, {"has_zero"}, {});
    if (n == 1) return mk_inst_app("one", carrier, {"has_one"}, {});
    mpz_class half = n / 2;
    if (n % 2 == 0) return mk_inst_app("bit0", carrier, {"has_add"}, {numeral_at(half, carrier)});
    return mk_inst_app("bit1", carrier, {"has_add", "has_one"}, {numeral_at(half, carrier)});
  }

  Expr local_type(const Expr& local) {
    if (!local.type().is_pre() && local.type()) return local.type();
    auto it = local_types_.find(local.name());
    if (it != local_types_.end()) return it->second;
    Expr ty = local.type().kind() == ExprKind::Placeholder ? new_mvar(mk_type()) : elab(local.type(), std::nullopt).first;
    local_types_[local.name()] = ty;
    return ty;
  }

  Expr fix_local(const Expr& local) {
    Expr ty = local_type(local);
    if (ty.raw() == local.type().raw()) return local;
    return mk_local(local.name(), local.pretty_name(), local.binder_info(), ty);
  }

  std::pair<Expr, Expr> elab(const Expr& e, const std::optional<Expr>& expected) {
    switch (e.kind()) {
      case ExprKind::Var: throw ElaborationFailure("loose bound variable #" + std::to_string(e.var_index()));
      case ExprKind::Sort: return {e, tc_.infer(e)};
      case ExprKind::MVar: return {e, e.type()};
      case ExprKind::Local: {
        Expr l = fix_local(e);
        return {l, l.type()};
      }
      case ExprKind::Placeholder: {
        Expr ty = expected ? *expected : new_mvar(mk_type());
        return {new_mvar(ty), ty};
      }
      case ExprKind::NatLit: {
        Expr carrier;
        if (expected) {
          Expr t = tc_.whnf(instantiate_mvars(*expected));
          if (t.is_const()) carrier = t;
        }
        if (!carrier) {
          carrier = new_mvar(mk_type());
          numeral_types_.push_back(carrier);
          if (expected) unify(carrier, *expected);
        }
        return {numeral_at(e.nat_value(), carrier), carrier};
      }
      case ExprKind::Const: {
        const Declaration* d = env_.find(e.name());
        if (!d) throw ElaborationFailure("unknown constant '" + e.name().str() + "'");
        if (e.name() == Name("zero") || e.name() == Name("one")) {
          // A bare zero/one elaborates like the literal.
          return elab(mk_nat(e.name() == Name("one") ? 1 : 0), expected);
        }
        Expr term = mk_const(e.name(), levels_for(*d));
        Expr type = d->type;
        insert_implicits(term, type);
        return {term, type};
      }
      case ExprKind::App: return elab_app(e, expected);
      case ExprKind::Lam: {
        Expr dom = elab_type(e.type());
        Expr l = mk_local(fresh_unique_name(), e.name(), e.binder_info(), dom);
        std::optional<Expr> body_expected;
        if (expected) {
          Expr t = tc_.whnf(instantiate_mvars(*expected));
          if (t.kind() == ExprKind::Pi) {
            unify(dom, t.type());
            body_expected = instantiate(t.body(), l);
          }
        }
        auto [body, bty] = elab(instantiate(e.body(), l), body_expected);
        if (body_expected && !unify(bty, *body_expected)) {
          throw TypeMismatch("lambda body has type " + print_raw(instantiate_mvars(bty)) + ", expected " +
                             print_raw(instantiate_mvars(*body_expected)));
        }
        return {mk_lambda(e.name(), e.binder_info(), dom, abstract(body, l)),
                mk_pi(e.name(), e.binder_info(), dom, abstract(bty, l))};
      }
      case ExprKind::Pi: {
        Expr dom = elab_type(e.type());
        Expr l = mk_local(fresh_unique_name(), e.name(), e.binder_info(), dom);
        auto [body, bsort] = elab_type_sorted(instantiate(e.body(), l));
        Expr result = mk_pi(e.name(), e.binder_info(), dom, abstract(body, l));
        // A Pi into Prop is a Prop whatever its domain.
        if (bsort.kind() == ExprKind::Sort && bsort.level() == Level::of(0)) return {result, bsort};
        return {result, sort_of_type(body)};
      }
      case ExprKind::Let: {
        Expr ty = elab_type(e.type());
        auto [val, vty] = elab(e.value(), ty);
        if (!unify(vty, ty)) throw TypeMismatch("let value does not match its declared type");
        Expr l = mk_local(fresh_unique_name(), e.name(), BinderInfo::Default, ty);
        auto [body, bty] = elab(instantiate(e.body(), l), expected);
        return {mk_let(e.name(), ty, val, abstract(body, l)), instantiate(abstract(bty, l), val)};
      }
    }
    throw ElaborationFailure("unsupported expression");
  }

  Expr elab_type(const Expr& e) {
    if (e.kind() == ExprKind::Placeholder) return new_mvar(mk_type());
    auto [t, tt] = elab(e, std::nullopt);
    Expr s = tc_.whnf(instantiate_mvars(tt));
    if (s.kind() != ExprKind::Sort && !is_ours(s)) throw ElaborationFailure(print_raw(t) + " is not a type");
    return t;
  }

  std::pair<Expr, Expr> elab_type_sorted(const Expr& e) {
    if (e.kind() == ExprKind::Placeholder) return {new_mvar(mk_type()), mk_type()};
    auto [t, tt] = elab(e, std::nullopt);
    Expr s = tc_.whnf(instantiate_mvars(tt));
    if (s.kind() != ExprKind::Sort && !is_ours(s)) throw ElaborationFailure(print_raw(t) + " is not a type");
    return {t, s};
  }

  Expr sort_of_type(const Expr& t) {
    try {
      Expr s = tc_.whnf(tc_.infer(instantiate_mvars(t)));
      if (s.kind() == ExprKind::Sort) return s;
    } catch (const TypeError&) {
    }
    return mk_type();
  }

  std::pair<Expr, Expr> elab_app(const Expr& e, const std::optional<Expr>& expected) {
    auto args = app_args(e);
    const Expr& head = app_fn(e);
    auto [term, type] = elab(head, std::nullopt);
    for (const auto& a : args) {
      insert_implicits_before_explicit(term, type);
      Expr t = tc_.whnf(instantiate_mvars(type));
      if (t.kind() != ExprKind::Pi) {
        throw ElaborationFailure("function expected: " + print_raw(instantiate_mvars(term)) + " has type " +
                                 print_raw(instantiate_mvars(type)));
      }
      auto [at, aty] = elab(a, t.type());
      if (!unify(aty, t.type())) {
        throw TypeMismatch("argument " + print_raw(instantiate_mvars(at)) + " has type " +
                           print_raw(instantiate_mvars(aty)) + " but " + print_raw(instantiate_mvars(term)) +
                           " expects " + print_raw(instantiate_mvars(t.type())));
      }
      term = mk_app(term, at);
      type = instantiate(t.body(), at);
    }
    (void)expected;
    return {term, type};
  }

  void insert_implicits_before_explicit(Expr& term, Expr& type) { insert_implicits(term, type); }

  void resolve_instances(bool final) {
    std::vector<Expr> still;
    for (const auto& m : pending_instances_) {
      if (assignment_.count(m.name())) continue;
      Expr ty = instantiate_mvars(m.type());
      if (ty.is_app() && ty.fn().is_const() && ty.arg().is_const()) {
        auto inst = env_.find_instance(ty.fn().name(), ty.arg().name());
        if (!inst) {
          throw ElaborationFailure("no instance " + ty.fn().name().str() + " " + ty.arg().name().str());
        }
        assignment_[m.name()] = mk_const(*inst);
        continue;
      }
      if (final) throw ElaborationFailure("unable to synthesize instance " + print_raw(ty));
      still.push_back(m);
    }
    pending_instances_ = std::move(still);
  }

  const Environment& env_;
  const ElabOptions& opts_;
  TypeChecker tc_;
  std::map<Name, Expr> assignment_;
  std::map<Name, Expr> local_types_;
  std::vector<Expr> pending_instances_;
  std::vector<Expr> numeral_types_;
  std::uint64_t counter_ = 0;
};

}  // namespace

std::pair<Expr, Expr> elaborate_with_type(const Environment& env, const Expr& pre, const std::optional<Expr>& expected,
                                          const ElabOptions& opts) {
  return Elaborator(env, opts).run(pre, expected);
}

Expr elaborate(const Environment& env, const Expr& pre, const std::optional<Expr>& expected, const ElabOptions& opts) {
  return elaborate_with_type(env, pre, expected, opts).first;
}

Expr erase_to_pre(const Environment& env, const Expr& e) {
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    switch (x.kind()) {
      case ExprKind::Const: return mk_const(x.name());
      case ExprKind::App: {
        const Expr& head = app_fn(x);
        auto args = app_args(x);
        Expr out = go(head);
        Expr ty;
        if (head.is_const()) {
          if (const Declaration* d = env.find(head.name())) ty = d->type;
        }
        for (const auto& a : args) {
          bool keep = true;
          if (ty && ty.kind() == ExprKind::Pi) {
            keep = ty.binder_info() == BinderInfo::Default;
            ty = ty.body();
          } else {
            ty = Expr();
          }
          if (keep) out = mk_app(out, go(a));
        }
        return out;
      }
      case ExprKind::Lam: return mk_lambda(x.name(), x.binder_info(), go(x.type()), go(x.body()));
      case ExprKind::Pi: return mk_pi(x.name(), x.binder_info(), go(x.type()), go(x.body()));
      case ExprKind::Let: return mk_let(x.name(), go(x.type()), go(x.value()), go(x.body()));
      default: return x;
    }
  };
  return go(e);
}

}  // namespace casbridge::kernel
