#include "casbridge/kernel/expr.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <unordered_map>

namespace casbridge::kernel {

// ---------------------------------------------------------------------------
// Name / Level

bool Name::valid_component(std::string_view c) {
  return !c.empty() && c.find('.') == std::string_view::npos;
}

Name::Name(std::vector<std::string> components) : parts_(std::move(components)) {
  if (parts_.empty()) throw SyntaxError("empty name");
  for (const auto& c : parts_) {
    if (!valid_component(c)) throw SyntaxError("invalid name component '" + c + "'");
  }
}

Name::Name(const char* dotted) : Name(parse(dotted)) {}
Name::Name(const std::string& dotted) : Name(parse(dotted)) {}

Name Name::parse(std::string_view dotted) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto dot = dotted.find('.', start);
    parts.emplace_back(dotted.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return Name(std::move(parts));
}

std::string Name::str() const {
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += '.';
    out += parts_[i];
  }
  return out;
}

Level Level::named(std::string p) {
  if (p.empty()) throw SyntaxError("empty universe parameter");
  return Level{Kind::Param, 0, std::move(p)};
}

std::string Level::str() const { return is_param() ? param : std::to_string(lit); }

std::string to_string(BinderInfo bi) {
  switch (bi) {
    case BinderInfo::Default: return "default";
    case BinderInfo::Implicit: return "implicit";
    case BinderInfo::InstImplicit: return "inst";
  }
  return "default";
}

BinderInfo binder_info_from_string(std::string_view s) {
  if (s == "default") return BinderInfo::Default;
  if (s == "implicit") return BinderInfo::Implicit;
  if (s == "inst") return BinderInfo::InstImplicit;
  throw SyntaxError("unknown binder info '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Construction

Expr make_node(detail::ExprNode&& n) {
  auto merge = [&](const Expr& child, std::uint64_t binder_shift) {
    if (!child) return;
    const auto* c = child.raw();
    std::uint64_t r = c->loose_range > binder_shift ? c->loose_range - binder_shift : 0;
    n.loose_range = std::max(n.loose_range, r);
    n.size += c->size;
    n.has_local = n.has_local || c->has_local;
    n.has_mvar = n.has_mvar || c->has_mvar;
    n.is_pre = n.is_pre || c->is_pre;
  };
  switch (n.kind) {
    case ExprKind::Var: n.loose_range = n.index + 1; break;
    case ExprKind::Local:
      n.has_local = true;
      merge(n.a, 0);
      break;
    case ExprKind::MVar:
      n.has_mvar = true;
      merge(n.a, 0);
      break;
    case ExprKind::App: merge(n.a, 0); merge(n.b, 0); break;
    case ExprKind::Lam:
    case ExprKind::Pi: merge(n.a, 0); merge(n.b, 1); break;
    case ExprKind::Let: merge(n.a, 0); merge(n.c, 0); merge(n.b, 1); break;
    case ExprKind::NatLit:
    case ExprKind::Placeholder: n.is_pre = true; break;
    default: break;
  }
  return Expr(std::make_shared<const detail::ExprNode>(std::move(n)));
}

namespace {
detail::ExprNode node_of(ExprKind k) {
  detail::ExprNode n;
  n.kind = k;
  return n;
}
}  // namespace

Expr mk_var(std::uint64_t i) {
  auto n = node_of(ExprKind::Var);
  n.index = i;
  return make_node(std::move(n));
}

Expr mk_sort(Level l) {
  auto n = node_of(ExprKind::Sort);
  n.level = std::move(l);
  return make_node(std::move(n));
}

Expr mk_prop() { return mk_sort(Level::of(0)); }
Expr mk_type() { return mk_sort(Level::of(1)); }

Expr mk_const(Name name, std::vector<Level> ls) {
  auto n = node_of(ExprKind::Const);
  n.name = std::move(name);
  n.levels = std::move(ls);
  return make_node(std::move(n));
}

Expr mk_mvar(Name name, Expr type) {
  auto n = node_of(ExprKind::MVar);
  n.name = std::move(name);
  n.a = std::move(type);
  return make_node(std::move(n));
}

Expr mk_local(Name unique, Name pretty, BinderInfo bi, Expr type) {
  auto n = node_of(ExprKind::Local);
  n.name = std::move(unique);
  n.pretty = std::move(pretty);
  n.binfo = bi;
  n.a = std::move(type);
  return make_node(std::move(n));
}

Expr mk_local(Name unique, Expr type) {
  Name pretty = unique;
  return mk_local(std::move(unique), std::move(pretty), BinderInfo::Default, std::move(type));
}

Expr mk_app(Expr f, Expr a) {
  auto n = node_of(ExprKind::App);
  n.a = std::move(f);
  n.b = std::move(a);
  return make_node(std::move(n));
}

Expr mk_app(Expr f, const std::vector<Expr>& args) {
  for (const auto& a : args) f = mk_app(std::move(f), a);
  return f;
}

namespace {
Expr mk_binding(ExprKind k, Name binder, BinderInfo bi, Expr type, Expr body) {
  auto n = node_of(k);
  n.name = std::move(binder);
  n.binfo = bi;
  n.a = std::move(type);
  n.b = std::move(body);
  return make_node(std::move(n));
}
}  // namespace

Expr mk_lambda(Name binder, BinderInfo bi, Expr type, Expr body) {
  return mk_binding(ExprKind::Lam, std::move(binder), bi, std::move(type), std::move(body));
}

Expr mk_pi(Name binder, BinderInfo bi, Expr type, Expr body) {
  return mk_binding(ExprKind::Pi, std::move(binder), bi, std::move(type), std::move(body));
}

Expr mk_arrow(Expr dom, Expr cod) {
  return mk_pi(Name("a"), BinderInfo::Default, std::move(dom), lift_loose(cod, 1));
}

Expr mk_let(Name binder, Expr type, Expr value, Expr body) {
  auto n = node_of(ExprKind::Let);
  n.name = std::move(binder);
  n.a = std::move(type);
  n.b = std::move(body);
  n.c = std::move(value);
  return make_node(std::move(n));
}

Expr mk_nat(mpz_class v) {
  if (v < 0) throw SyntaxError("negative numeral");
  auto n = node_of(ExprKind::NatLit);
  n.nat = std::move(v);
  return make_node(std::move(n));
}

Expr mk_placeholder() { return make_node(node_of(ExprKind::Placeholder)); }

// ---------------------------------------------------------------------------
// Accessors

ExprKind Expr::kind() const { return node_->kind; }
std::uint64_t Expr::var_index() const { return node_->index; }
const Level& Expr::level() const { return node_->level; }
const Name& Expr::name() const { return node_->name; }
const std::vector<Level>& Expr::levels() const { return node_->levels; }
const Name& Expr::pretty_name() const { return node_->pretty; }
BinderInfo Expr::binder_info() const { return node_->binfo; }
const Expr& Expr::type() const { return node_->a; }
const Expr& Expr::fn() const { return node_->a; }
const Expr& Expr::arg() const { return node_->b; }
const Expr& Expr::body() const { return node_->b; }
const Expr& Expr::value() const { return node_->c; }
const mpz_class& Expr::nat_value() const { return node_->nat; }
std::uint64_t Expr::loose_bvar_range() const { return node_ ? node_->loose_range : 0; }
bool Expr::has_locals() const { return node_ && node_->has_local; }
bool Expr::has_mvars() const { return node_ && node_->has_mvar; }
bool Expr::is_pre() const { return node_ && node_->is_pre; }
std::size_t Expr::size() const { return node_ ? node_->size : 0; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return true;
  if (!a.raw() || !b.raw()) return false;
  const auto& x = *a.raw();
  const auto& y = *b.raw();
  if (x.kind != y.kind || x.size != y.size) return false;
  switch (x.kind) {
    case ExprKind::Var: return x.index == y.index;
    case ExprKind::Sort: return x.level == y.level;
    case ExprKind::Const: return x.name == y.name && x.levels == y.levels;
    case ExprKind::MVar: return x.name == y.name && x.a == y.a;
    case ExprKind::Local:
      return x.name == y.name && x.pretty == y.pretty && x.binfo == y.binfo && x.a == y.a;
    case ExprKind::App: return x.a == y.a && x.b == y.b;
    case ExprKind::Lam:
    case ExprKind::Pi: return x.name == y.name && x.binfo == y.binfo && x.a == y.a && x.b == y.b;
    case ExprKind::Let: return x.name == y.name && x.a == y.a && x.c == y.c && x.b == y.b;
    case ExprKind::NatLit: return x.nat == y.nat;
    case ExprKind::Placeholder: return true;
  }
  return false;
}

bool alpha_equal(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return true;
  if (!a.raw() || !b.raw()) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Var: return a.var_index() == b.var_index();
    case ExprKind::Sort: return a.level() == b.level();
    case ExprKind::Const: return a.name() == b.name();
    case ExprKind::MVar: return a.name() == b.name();
    case ExprKind::Local: return a.name() == b.name();
    case ExprKind::App: return alpha_equal(a.fn(), b.fn()) && alpha_equal(a.arg(), b.arg());
    case ExprKind::Lam:
    case ExprKind::Pi: return alpha_equal(a.type(), b.type()) && alpha_equal(a.body(), b.body());
    case ExprKind::Let:
      return alpha_equal(a.type(), b.type()) && alpha_equal(a.value(), b.value()) &&
             alpha_equal(a.body(), b.body());
    case ExprKind::NatLit: return a.nat_value() == b.nat_value();
    case ExprKind::Placeholder: return true;
  }
  return false;
}

const Expr& app_fn(const Expr& e) {
  const Expr* cur = &e;
  while (cur->is_app()) cur = &cur->fn();
  return *cur;
}

std::vector<Expr> app_args(const Expr& e) {
  std::vector<Expr> out;
  const Expr* cur = &e;
  while (cur->is_app()) {
    out.push_back(cur->arg());
    cur = &cur->fn();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// De Bruijn operations

namespace {

/// Rebuild `e` with `f` applied to each child; `f(child, extra_depth)`.
template <typename F>
Expr map_children(const Expr& e, F&& f) {
  const auto* n = e.raw();
  switch (n->kind) {
    case ExprKind::MVar: return mk_mvar(n->name, f(n->a, 0));
    case ExprKind::Local: return mk_local(n->name, n->pretty, n->binfo, f(n->a, 0));
    case ExprKind::App: return mk_app(f(n->a, 0), f(n->b, 0));
    case ExprKind::Lam: return mk_lambda(n->name, n->binfo, f(n->a, 0), f(n->b, 1));
    case ExprKind::Pi: return mk_pi(n->name, n->binfo, f(n->a, 0), f(n->b, 1));
    case ExprKind::Let: return mk_let(n->name, f(n->a, 0), f(n->c, 0), f(n->b, 1));
    default: return e;
  }
}

Expr lift_rec(const Expr& e, std::uint64_t amount, std::uint64_t from) {
  if (e.loose_bvar_range() <= from) return e;
  if (e.kind() == ExprKind::Var) return mk_var(e.var_index() + amount);
  return map_children(e, [&](const Expr& c, std::uint64_t d) { return lift_rec(c, amount, from + d); });
}

Expr instantiate_rec(const Expr& e, const Expr& repl, std::uint64_t depth) {
  if (e.loose_bvar_range() <= depth) return e;
  if (e.kind() == ExprKind::Var) {
    auto i = e.var_index();
    if (i == depth) return lift_rec(repl, depth, 0);
    return mk_var(i > depth ? i - 1 : i);
  }
  return map_children(e, [&](const Expr& c, std::uint64_t d) { return instantiate_rec(c, repl, depth + d); });
}

Expr abstract_rec(const Expr& e, const Name& unique, std::uint64_t depth) {
  if (!e.has_locals()) return e;
  if (e.kind() == ExprKind::Local && e.name() == unique) return mk_var(depth);
  return map_children(e, [&](const Expr& c, std::uint64_t d) { return abstract_rec(c, unique, depth + d); });
}

Expr replace_local_rec(const Expr& e, const Name& unique, const Expr& repl, std::uint64_t depth) {
  if (!e.has_locals()) return e;
  if (e.kind() == ExprKind::Local && e.name() == unique) return lift_rec(repl, depth, 0);
  return map_children(e, [&](const Expr& c, std::uint64_t d) {
    return replace_local_rec(c, unique, repl, depth + d);
  });
}

}  // namespace

bool has_loose_bvar(const Expr& e, std::uint64_t i) {
  if (e.loose_bvar_range() <= i) return false;
  switch (e.kind()) {
    case ExprKind::Var: return e.var_index() == i;
    case ExprKind::App: return has_loose_bvar(e.fn(), i) || has_loose_bvar(e.arg(), i);
    case ExprKind::Lam:
    case ExprKind::Pi: return has_loose_bvar(e.type(), i) || has_loose_bvar(e.body(), i + 1);
    case ExprKind::Let:
      return has_loose_bvar(e.type(), i) || has_loose_bvar(e.value(), i) || has_loose_bvar(e.body(), i + 1);
    default: return false;
  }
}

Expr lift_loose(const Expr& e, std::uint64_t amount, std::uint64_t from) {
  if (amount == 0) return e;
  return lift_rec(e, amount, from);
}

Expr instantiate(const Expr& body, const Expr& replacement) {
  return instantiate_rec(body, replacement, 0);
}

Expr abstract(const Expr& e, const Expr& local) {
  if (!local.is_local()) throw std::invalid_argument("abstract: expected a local constant");
  return abstract_rec(e, local.name(), 0);
}

Expr replace_local(const Expr& e, const Expr& local, const Expr& replacement) {
  return replace_local_rec(e, local.name(), replacement, 0);
}

Name fresh_unique_name() {
  static std::atomic<std::uint64_t> counter{0};
  return Name(std::vector<std::string>{"_uniq", std::to_string(++counter)});
}

}  // namespace casbridge::kernel
