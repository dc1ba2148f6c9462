#include "casbridge/prover/prover.hpp"

namespace casbridge::prover {

namespace {

using K = PropFormula::Kind;
using kernel::Expr;
using kernel::mk_app;
using kernel::mk_const;

PropFormula desugar(const PropFormula& f) {
  switch (f.kind()) {
    case K::Atom:
    case K::False: return f;
    case K::Not: return PropFormula::implies(desugar(f.lhs()), PropFormula::falsum());
    case K::Iff: {
      PropFormula a = desugar(f.lhs()), b = desugar(f.rhs());
      return PropFormula::conj(PropFormula::implies(a, b), PropFormula::implies(b, a));
    }
    case K::And: return PropFormula::conj(desugar(f.lhs()), desugar(f.rhs()));
    case K::Or: return PropFormula::disj(desugar(f.lhs()), desugar(f.rhs()));
    case K::Implies: return PropFormula::implies(desugar(f.lhs()), desugar(f.rhs()));
  }
  return f;
}

struct Hyp {
  PropFormula f;
  Expr term;
};

using Ctx = std::vector<Hyp>;

Ctx without(const Ctx& ctx, std::size_t i) {
  Ctx out;
  out.reserve(ctx.size());
  for (std::size_t j = 0; j < ctx.size(); ++j) {
    if (j != i) out.push_back(ctx[j]);
  }
  return out;
}

constexpr int kMaxDepth = 400;

// G4ip (contraction-free sequent calculus), building terms as it goes:
// invertible rules first, then R∨ and L→→ with backtracking.
class Search {
 public:
  explicit Search(AtomTable& atoms) : atoms_(atoms) {}

  std::optional<Expr> prove(Ctx ctx, const PropFormula& goal, int depth) {
    if (depth > kMaxDepth) return std::nullopt;
    if (goal.kind() == K::Implies) {
      Expr h = hyp_local(goal.lhs());
      ctx.push_back({goal.lhs(), h});
      auto body = prove(std::move(ctx), goal.rhs(), depth + 1);
      if (!body) return std::nullopt;
      return lambda(h, *body);
    }
    if (goal.kind() == K::And) {
      auto a = prove(ctx, goal.lhs(), depth + 1);
      if (!a) return std::nullopt;
      auto b = prove(std::move(ctx), goal.rhs(), depth + 1);
      if (!b) return std::nullopt;
      return mk_app(mk_const("and.intro"), {enc(goal.lhs()), enc(goal.rhs()), *a, *b});
    }
    for (const auto& h : ctx) {
      if (h.f == goal) return h.term;
    }
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const PropFormula& f = ctx[i].f;
      const Expr& t = ctx[i].term;
      switch (f.kind()) {
        case K::False: return mk_app(mk_const("false.elim"), {enc(goal), t});
        case K::And: {
          Ctx rest = without(ctx, i);
          rest.push_back({f.lhs(), mk_app(mk_const("and.elim_left"), {enc(f.lhs()), enc(f.rhs()), t})});
          rest.push_back({f.rhs(), mk_app(mk_const("and.elim_right"), {enc(f.lhs()), enc(f.rhs()), t})});
          return prove(std::move(rest), goal, depth + 1);
        }
        case K::Or: {
          Ctx rest = without(ctx, i);
          Expr ha = hyp_local(f.lhs());
          Ctx left = rest;
          left.push_back({f.lhs(), ha});
          auto pl = prove(std::move(left), goal, depth + 1);
          if (!pl) return std::nullopt;
          Expr hb = hyp_local(f.rhs());
          rest.push_back({f.rhs(), hb});
          auto pr = prove(std::move(rest), goal, depth + 1);
          if (!pr) return std::nullopt;
          return mk_app(mk_const("or.elim"), {enc(f.lhs()), enc(f.rhs()), enc(goal), t, lambda(ha, *pl), lambda(hb, *pr)});
        }
        case K::Implies: {
          const PropFormula& a = f.lhs();
          const PropFormula& b = f.rhs();
          if (a.kind() == K::False) return prove(without(ctx, i), goal, depth + 1);
          if (a.kind() == K::Atom) {
            for (const auto& h : ctx) {
              if (h.f == a) {
                Ctx rest = without(ctx, i);
                rest.push_back({b, mk_app(t, h.term)});
                return prove(std::move(rest), goal, depth + 1);
              }
            }
          }
          if (a.kind() == K::And) {
            // (C ∧ D → B) becomes C → D → B.
            Expr c = hyp_local(a.lhs()), d = hyp_local(a.rhs());
            Expr inner = mk_app(t, mk_app(mk_const("and.intro"), {enc(a.lhs()), enc(a.rhs()), c, d}));
            Ctx rest = without(ctx, i);
            rest.push_back({PropFormula::implies(a.lhs(), PropFormula::implies(a.rhs(), b)), lambda(c, lambda(d, inner))});
            return prove(std::move(rest), goal, depth + 1);
          }
          if (a.kind() == K::Or) {
            // (C ∨ D → B) becomes C → B and D → B.
            Expr c = hyp_local(a.lhs()), d = hyp_local(a.rhs());
            Ctx rest = without(ctx, i);
            rest.push_back({PropFormula::implies(a.lhs(), b),
                            lambda(c, mk_app(t, mk_app(mk_const("or.inl"), {enc(a.lhs()), enc(a.rhs()), c})))});
            rest.push_back({PropFormula::implies(a.rhs(), b),
                            lambda(d, mk_app(t, mk_app(mk_const("or.inr"), {enc(a.lhs()), enc(a.rhs()), d})))});
            return prove(std::move(rest), goal, depth + 1);
          }
          break;
        }
        default: break;
      }
    }
    if (goal.kind() == K::Or) {
      if (auto a = prove(ctx, goal.lhs(), depth + 1)) {
        return mk_app(mk_const("or.inl"), {enc(goal.lhs()), enc(goal.rhs()), *a});
      }
      if (auto b = prove(ctx, goal.rhs(), depth + 1)) {
        return mk_app(mk_const("or.inr"), {enc(goal.lhs()), enc(goal.rhs()), *b});
      }
    }
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const PropFormula& f = ctx[i].f;
      if (f.kind() != K::Implies || f.lhs().kind() != K::Implies) continue;
      // ((C → D) → B): prove C → D assuming D → B, then continue with B.
      const PropFormula& c = f.lhs().lhs();
      const PropFormula& d = f.lhs().rhs();
      const PropFormula& b = f.rhs();
      const Expr& t = ctx[i].term;
      Expr dl = hyp_local(d);
      Expr q = lambda(dl, mk_app(t, kernel::mk_lambda(next_name(), kernel::BinderInfo::Default, enc(c), dl)));
      Ctx first = without(ctx, i);
      first.push_back({PropFormula::implies(d, b), q});
      auto cd = prove(std::move(first), PropFormula::implies(c, d), depth + 1);
      if (!cd) continue;
      Ctx second = without(ctx, i);
      second.push_back({b, mk_app(t, *cd)});
      if (auto r = prove(std::move(second), goal, depth + 1)) return r;
    }
    return std::nullopt;
  }

 private:
  Expr enc(const PropFormula& f) { return encode(f, atoms_); }

  kernel::Name next_name() {
    std::size_t n = counter_++;
    return kernel::Name(n == 0 ? "h" : "h" + std::to_string(n));
  }

  Expr hyp_local(const PropFormula& f) {
    return kernel::mk_local(kernel::fresh_unique_name(), next_name(), kernel::BinderInfo::Default, enc(f));
  }

  static Expr lambda(const Expr& local, const Expr& body) {
    return kernel::mk_lambda(local.pretty_name(), kernel::BinderInfo::Default, local.type(), kernel::abstract(body, local));
  }

  AtomTable& atoms_;
  std::size_t counter_ = 0;
};

}  // namespace

std::optional<kernel::Expr> intuit(const PropFormula& f, AtomTable& atoms) {
  return Search(atoms).prove({}, desugar(f), 0);
}

}  // namespace casbridge::prover
