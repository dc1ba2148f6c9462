#include <gtest/gtest.h>

#include <random>

#include "casbridge/error.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/numeral.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/syntax.hpp"
#include "casbridge/kernel/type_check.hpp"

using namespace casbridge;
using namespace casbridge::kernel;

namespace {

// Named lambda terms, converted to de Bruijn by an independent routine.
struct NTerm {
  enum K { V, L, A } k;
  std::string name;
  std::shared_ptr<NTerm> a, b;
};
using NP = std::shared_ptr<NTerm>;

NP nv(std::string n) { return std::make_shared<NTerm>(NTerm{NTerm::V, std::move(n), nullptr, nullptr}); }
NP nl(std::string n, NP b) { return std::make_shared<NTerm>(NTerm{NTerm::L, std::move(n), b, nullptr}); }
NP na(NP f, NP x) { return std::make_shared<NTerm>(NTerm{NTerm::A, "", f, x}); }

Expr to_db(const NP& t, std::vector<std::string>& scope, const std::map<std::string, Expr>& free) {
  switch (t->k) {
    case NTerm::V:
      for (std::size_t i = scope.size(); i-- > 0;) {
        if (scope[i] == t->name) return mk_var(scope.size() - 1 - i);
      }
      return free.at(t->name);
    case NTerm::L: {
      scope.push_back(t->name);
      Expr body = to_db(t->a, scope, free);
      scope.pop_back();
      return mk_lambda(t->name, BinderInfo::Default, mk_const("real"), body);
    }
    case NTerm::A: return mk_app(to_db(t->a, scope, free), to_db(t->b, scope, free));
  }
  return {};
}

// Capture-free substitution: binder names used by random_term never collide
// with free names, so plain replacement under non-shadowing binders suffices.
NP subst(const NP& t, const std::string& x, const NP& r) {
  switch (t->k) {
    case NTerm::V: return t->name == x ? r : t;
    case NTerm::L: return t->name == x ? t : nl(t->name, subst(t->a, x, r));
    case NTerm::A: return na(subst(t->a, x, r), subst(t->b, x, r));
  }
  return t;
}

NP random_term(std::mt19937& rng, int depth, std::vector<std::string>& bound) {
  std::uniform_int_distribution<int> pick(0, 9);
  int c = depth <= 0 ? 0 : pick(rng);
  if (c < 4) {
    std::vector<std::string> pool = {"x", "y", "c"};
    pool.insert(pool.end(), bound.begin(), bound.end());
    return nv(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
  }
  if (c < 7) {
    std::string n = "b" + std::to_string(bound.size());
    bound.push_back(n);
    auto body = random_term(rng, depth - 1, bound);
    bound.pop_back();
    return nl(n, body);
  }
  return na(random_term(rng, depth - 1, bound), random_term(rng, depth - 1, bound));
}

Expr parse(const std::string& s) { return expr_of_sexpr(read_sexprs(s).at(0)); }

}  // namespace

TEST(Expr, AbstractInstantiateMatchesNamedSubstitution) {
  std::mt19937 rng(7);
  Expr x = mk_local("ux", "x", BinderInfo::Default, mk_const("real"));
  Expr y = mk_local("uy", "y", BinderInfo::Default, mk_const("real"));
  Expr c = mk_const("c");
  std::map<std::string, Expr> free = {{"x", x}, {"y", y}, {"c", c}};
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> bound;
    NP t = random_term(rng, 6, bound);
    std::vector<std::string> scope;
    Expr e = to_db(t, scope, free);
    Expr abs = abstract(e, x);
    EXPECT_FALSE(abs.has_locals() && [&] {
      bool found = false;
      for_each(abs, [&](const Expr& s) {
        if (s.is_local() && s.name() == x.name()) found = true;
        return !found;
      });
      return found;
    }());
    EXPECT_EQ(instantiate(abs, x), e);
    EXPECT_EQ(instantiate(abs, y), to_db(subst(t, "x", nv("y")), scope, free));
    EXPECT_EQ(replace_local(e, x, c), to_db(subst(t, "x", nv("c")), scope, free));
  }
}

TEST(Expr, LooseBvarRange) {
  Expr e = mk_app(mk_var(0), mk_lambda("z", BinderInfo::Default, mk_prop(), mk_var(3)));
  EXPECT_EQ(e.loose_bvar_range(), 3u);
  EXPECT_EQ(lift_loose(e, 2).loose_bvar_range(), 5u);
}

TEST(Numeral, SixIsBit0Bit1One) {
  Expr six = numeral_encode(6);
  Expr expected = mk_app(mk_const("bit0"), mk_app(mk_const("bit1"), mk_const("one")));
  EXPECT_EQ(six, expected);
  EXPECT_EQ(print_raw(six), "bit0 (bit1 one)");
}

TEST(Numeral, RoundTripSmallAndRandom) {
  for (int n = 0; n <= 10000; ++n) ASSERT_EQ(numeral_decode(numeral_encode(n)), n);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    mpz_class n;
    mpz_import(n.get_mpz_t(), 1, 1, sizeof(std::uint64_t), 0, 0, &(const std::uint64_t&)rng());
    ASSERT_EQ(numeral_decode(numeral_encode(n)), n);
  }
}

TEST(Numeral, DecodeCountsBitsIndependently) {
  // Oracle: value = fold over the spine from the innermost `one`.
  Expr e = numeral_encode(mpz_class("123456789012345678901234567890"));
  mpz_class v = 0;
  std::vector<std::string> spine;
  Expr cur = e;
  while (cur.is_app()) {
    spine.push_back(app_fn(cur).name().str());
    cur = app_args(cur).back();
  }
  ASSERT_EQ(cur.name().str(), "one");
  v = 1;
  for (auto it = spine.rbegin(); it != spine.rend(); ++it) v = 2 * v + (*it == "bit1" ? 1 : 0);
  EXPECT_EQ(v, mpz_class("123456789012345678901234567890"));
  EXPECT_EQ(numeral_decode(e), v);
}

TEST(Numeral, RejectsNonNumerals) {
  EXPECT_THROW(numeral_decode(mk_const("two")), NotANumeral);
  EXPECT_THROW(numeral_decode(mk_app(mk_const("bit0"), mk_const("x"))), NotANumeral);
  EXPECT_FALSE(is_numeral(mk_const("add")));
}

TEST(Environment, PreludeLoadsAndRejectsDuplicates) {
  const Environment& env = prelude();
  EXPECT_NE(env.find("real"), nullptr);
  EXPECT_EQ(env.get("add").univ_params.size(), 1u);
  EXPECT_EQ(env.find_instance("has_add", "nat"), std::optional<Name>("nat.has_add"));
  EXPECT_FALSE(env.find_instance("has_neg", "nat"));
  Declaration d{"real", DeclKind::Axiom, {}, mk_type(), std::nullopt, "", ""};
  EXPECT_THROW(env.add(d), DuplicateName);
  EXPECT_THROW(env.get("no.such"), UnknownDeclaration);
}

TEST(Environment, EveryPreludeDeclarationTypeChecks) {
  const Environment& env = prelude();
  TypeChecker tc(env);
  for (const auto* d : env.declarations()) {
    SCOPED_TRACE(d->name.str());
    Expr s = tc.whnf(tc.infer(d->type));
    EXPECT_EQ(s.kind(), ExprKind::Sort);
    if (d->value) EXPECT_NO_THROW(tc.check(*d->value, d->type));
  }
}

TEST(TypeCheck, RejectsIllTyped) {
  const Environment& env = prelude();
  EXPECT_THROW(type_check(env, parse("(add real real.has_add trivial trivial)")), TypeError);
  EXPECT_THROW(type_check(env, parse("(add nat real.has_add)")), TypeError);
  EXPECT_THROW(type_check(env, parse("(real real)")), TypeError);
  EXPECT_THROW(type_check(env, parse("nonexistent")), Error);
}

TEST(TypeCheck, DefinitionsUnfoldInDefeq) {
  const Environment& env = prelude();
  TypeChecker tc(env);
  Expr a = parse("(not false)");
  Expr b = parse("(-> false false)");
  EXPECT_TRUE(tc.is_def_eq(a, b));
  EXPECT_NO_THROW(tc.check(parse("(fun (h false) h)"), a));
}

TEST(Elaborate, InsertsImplicitsAndInstances) {
  const Environment& env = prelude();
  Expr pre = mk_app(mk_const("add"), {mk_const("nat.one"), mk_const("nat.one")});
  Expr e = elaborate(env, pre);
  EXPECT_EQ(print_raw(e), "add nat nat.has_add nat.one nat.one");
  EXPECT_TRUE(alpha_equal(type_check(env, e), mk_const("nat")));
  EXPECT_TRUE(alpha_equal(erase_to_pre(env, e), pre));
}

TEST(Elaborate, NumeralsDefaultToReal) {
  const Environment& env = prelude();
  Expr x = mk_local("ux", "x", BinderInfo::Default, mk_const("real"));
  Expr pre = mk_app(mk_const("pow_nat"), {mk_app(mk_const("add"), {mk_app(mk_const("neg"), mk_const("one")), x}),
                                          mk_app(mk_const("bit0"), mk_const("one"))});
  Expr e = elaborate(env, pre);
  EXPECT_EQ(print_raw(e),
            "pow_nat real real.has_pow_nat (add real real.has_add (neg real real.has_neg (one real real.has_one)) x) "
            "(bit0 nat nat.has_add (one nat nat.has_one))");
  EXPECT_EQ(pretty(env, e), "(-1 + x)^2");
  Expr lit = elaborate(env, mk_nat(5));
  EXPECT_TRUE(alpha_equal(type_check(env, lit), mk_const("real")));
  EXPECT_EQ(numeral_decode(lit), 5);
}

TEST(Elaborate, FailsOnMismatchAndMissingInstance) {
  const Environment& env = prelude();
  EXPECT_THROW(elaborate(env, mk_app(mk_const("add"), {mk_const("nat.one"), mk_const("trivial")})), TypeMismatch);
  EXPECT_THROW(elaborate(env, mk_app(mk_const("neg"), mk_const("nat.one"))), ElaborationFailure);
  EXPECT_THROW(elaborate(env, mk_const("nat.one"), mk_const("real")), TypeMismatch);
}

TEST(Surface, ParsesAndElaboratesInfix) {
  const Environment& env = prelude();
  SurfaceContext ctx;
  ctx.env = &env;
  ctx.default_type = mk_const("real");
  Expr pre = parse_surface("x^2 - 1 = 2x + 3 ∧ ¬(x < 0)", ctx);
  Expr e = elaborate(env, pre, mk_prop());
  EXPECT_EQ(pretty(env, e), "x^2 - 1 = 2 * x + 3 ∧ ¬(x < 0)");
  EXPECT_THROW(parse_surface("x +", ctx), Error);
}

TEST(Printer, PrettyHidesImplicitsRawShowsThem) {
  const Environment& env = prelude();
  Expr e = parse("(and.intro true true trivial trivial)");
  EXPECT_EQ(pretty(env, e), "and.intro trivial trivial");
  EXPECT_EQ(print_raw(e), "and.intro true true trivial trivial");
}
