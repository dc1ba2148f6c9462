#include "casbridge/error.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/prover/prover.hpp"

namespace casbridge::prover {

struct PropFormula::Node {
  Kind kind;
  std::string name;
  std::optional<PropFormula> l, r;
  std::size_t size = 1;
};

namespace {

std::shared_ptr<const PropFormula::Node> make(PropFormula::Kind k, std::string name, std::optional<PropFormula> l,
                                              std::optional<PropFormula> r) {
  std::size_t size = 1 + (l ? l->size() : 0) + (r ? r->size() : 0);
  return std::make_shared<const PropFormula::Node>(PropFormula::Node{k, std::move(name), std::move(l), std::move(r), size});
}

}  // namespace

PropFormula PropFormula::wrap(std::shared_ptr<const Node> n) { return PropFormula(std::move(n)); }

PropFormula PropFormula::atom(std::string name) {
  if (name.empty()) throw TranslationFailed("empty atom name");
  return wrap(make(Kind::Atom, std::move(name), std::nullopt, std::nullopt));
}
PropFormula PropFormula::falsum() { return wrap(make(Kind::False, "", std::nullopt, std::nullopt)); }
PropFormula PropFormula::conj(PropFormula l, PropFormula r) { return wrap(make(Kind::And, "", std::move(l), std::move(r))); }
PropFormula PropFormula::disj(PropFormula l, PropFormula r) { return wrap(make(Kind::Or, "", std::move(l), std::move(r))); }
PropFormula PropFormula::implies(PropFormula l, PropFormula r) {
  return wrap(make(Kind::Implies, "", std::move(l), std::move(r)));
}
PropFormula PropFormula::neg(PropFormula p) { return wrap(make(Kind::Not, "", std::move(p), std::nullopt)); }
PropFormula PropFormula::iff(PropFormula l, PropFormula r) { return wrap(make(Kind::Iff, "", std::move(l), std::move(r))); }

PropFormula::Kind PropFormula::kind() const { return n_->kind; }
const std::string& PropFormula::name() const { return n_->name; }
const PropFormula& PropFormula::lhs() const { return *n_->l; }
const PropFormula& PropFormula::rhs() const { return *n_->r; }
std::size_t PropFormula::size() const { return n_->size; }

bool operator==(const PropFormula& a, const PropFormula& b) {
  if (a.n_ == b.n_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case PropFormula::Kind::Atom: return a.name() == b.name();
    case PropFormula::Kind::False: return true;
    case PropFormula::Kind::Not: return a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

std::string to_string(const PropFormula& f) {
  using K = PropFormula::Kind;
  switch (f.kind()) {
    case K::Atom: return f.name();
    case K::False: return "⊥";
    case K::Not: return "¬" + to_string(f.lhs());
    case K::And: return "(" + to_string(f.lhs()) + " ∧ " + to_string(f.rhs()) + ")";
    case K::Or: return "(" + to_string(f.lhs()) + " ∨ " + to_string(f.rhs()) + ")";
    case K::Implies: return "(" + to_string(f.lhs()) + " → " + to_string(f.rhs()) + ")";
    case K::Iff: return "(" + to_string(f.lhs()) + " ↔ " + to_string(f.rhs()) + ")";
  }
  return "";
}

kernel::Expr AtomTable::get(const std::string& name) {
  auto it = by_name_.find(name);
  if (it != by_name_.end()) return it->second;
  std::string pretty = name;
  for (auto& c : pretty) {
    if (c == '.') c = '_';
  }
  kernel::Expr l = kernel::mk_local(kernel::fresh_unique_name(), kernel::Name(std::vector<std::string>{pretty}),
                                    kernel::BinderInfo::Default, kernel::mk_prop());
  by_name_.emplace(name, l);
  order_.emplace_back(name, l);
  return l;
}

std::optional<std::string> AtomTable::name_of(const kernel::Expr& e) const {
  for (const auto& [n, x] : order_) {
    if (kernel::alpha_equal(x, e)) return n;
  }
  return std::nullopt;
}

std::string AtomTable::add(const kernel::Expr& e, const std::string& preferred) {
  if (auto n = name_of(e)) return *n;
  std::string name = preferred.empty() ? "p" : preferred;
  while (by_name_.count(name)) name += "'";
  by_name_.emplace(name, e);
  order_.emplace_back(name, e);
  return name;
}

kernel::Expr encode(const PropFormula& f, AtomTable& atoms) {
  using K = PropFormula::Kind;
  using kernel::mk_app;
  using kernel::mk_const;
  switch (f.kind()) {
    case K::Atom: return atoms.get(f.name());
    case K::False: return mk_const("false");
    case K::Not: return mk_app(mk_const("not"), encode(f.lhs(), atoms));
    case K::And: return mk_app(mk_const("and"), {encode(f.lhs(), atoms), encode(f.rhs(), atoms)});
    case K::Or: return mk_app(mk_const("or"), {encode(f.lhs(), atoms), encode(f.rhs(), atoms)});
    case K::Implies: return kernel::mk_arrow(encode(f.lhs(), atoms), encode(f.rhs(), atoms));
    case K::Iff: return mk_app(mk_const("iff"), {encode(f.lhs(), atoms), encode(f.rhs(), atoms)});
  }
  return {};
}

PropFormula prop_of_kernel(const kernel::Environment& env, const kernel::Expr& e, AtomTable& atoms) {
  const kernel::Expr& f = kernel::app_fn(e);
  auto args = kernel::app_args(e);
  std::string head = f.is_const() ? f.name().str() : "";
  if (head == "false" && args.empty()) return PropFormula::falsum();
  if (head == "not" && args.size() == 1) return PropFormula::neg(prop_of_kernel(env, args[0], atoms));
  if ((head == "and" || head == "or" || head == "iff") && args.size() == 2) {
    PropFormula l = prop_of_kernel(env, args[0], atoms);
    PropFormula r = prop_of_kernel(env, args[1], atoms);
    return head == "and" ? PropFormula::conj(l, r) : head == "or" ? PropFormula::disj(l, r) : PropFormula::iff(l, r);
  }
  if (e.kind() == kernel::ExprKind::Pi && !kernel::has_loose_bvar(e.body(), 0)) {
    return PropFormula::implies(prop_of_kernel(env, e.type(), atoms), prop_of_kernel(env, e.body(), atoms));
  }
  kernel::Expr t;
  try {
    t = kernel::type_check(env, e);
  } catch (const Error& err) {
    throw TranslationFailed(err.what());
  }
  if (!kernel::alpha_equal(t, kernel::mk_prop())) throw TranslationFailed("not a proposition: " + kernel::print_raw(e));
  std::string preferred = e.is_local() ? e.pretty_name().str() : kernel::print_raw(e);
  return PropFormula::atom(atoms.add(e, preferred));
}

}  // namespace casbridge::prover
