#include <gtest/gtest.h>

#include <random>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/bridge/translate.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/syntax.hpp"
#include "casbridge/kernel/type_check.hpp"

#include "support/oracles.hpp"

using namespace casbridge;
namespace k = casbridge::kernel;
using test_support::random_kernel;

namespace {

struct Real {
  k::SurfaceContext sc;
  Real() {
    sc.env = &k::prelude();
    sc.default_type = k::mk_const("real");
  }
  k::Expr elab(const std::string& src) { return k::elaborate(k::prelude(), k::parse_surface(src, sc)); }
  k::Expr local(const std::string& n) { return sc.locals.at(n); }
};

cas::Expr sym(const char* s) { return cas::sym(s); }

std::string with_x(std::string text, const cas::Expr& X) {
  std::string x = cas::render(X);
  for (auto pos = text.find('X'); pos != std::string::npos; pos = text.find('X', pos + x.size())) text.replace(pos, 1, x);
  return text;
}

bool has_local(const k::Expr& e) {
  bool found = false;
  k::for_each(e, [&](const k::Expr& s) {
    if (s.kind() == k::ExprKind::Local) found = true;
    return true;
  });
  return found;
}

}  // namespace

TEST(Reflect, Examples) {
  EXPECT_EQ(cas::render(bridge::reflect(k::mk_var(0))), "LeanVar[0]");
  EXPECT_EQ(cas::render(bridge::reflect(k::mk_sort(k::Level::named("u")))), "LeanSort[LeanLevelParam[\"u\"]]");
  Real r;
  k::Expr e = r.elab("x + x");
  cas::Expr X = bridge::reflect(r.local("x"));
  EXPECT_EQ(bridge::reflect(e),
            cas::parse(with_x("LeanApp[LeanApp[LeanApp[LeanApp[LeanConst[\"add\", {0}], LeanConst[\"real\", {}]], "
                   "LeanConst[\"real.has_add\", {}]], X], X]",
                   X)));
  EXPECT_TRUE(X.is_app("LeanLocal", 4));
}

TEST(Reflect, Malformed) {
  EXPECT_THROW(bridge::decode_reflection(cas::parse("LeanApp[LeanVar[0]]")), MalformedReflection);
  EXPECT_THROW(bridge::decode_reflection(cas::parse("LeanVar[-1]")), MalformedReflection);
  EXPECT_THROW(bridge::decode_reflection(cas::parse("LeanConst[\"a\", {x}]")), MalformedReflection);
  EXPECT_THROW(bridge::decode_reflection(cas::parse("Plus[1, 2]")), MalformedReflection);
}

TEST(Reflect, RandomRoundTrip) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    k::Expr e = random_kernel(rng, 8, 0);
    cas::Expr r = bridge::reflect(e);
    // Through the wire renderer and parser as well.
    cas::Expr again = cas::parse(cas::render(r));
    ASSERT_EQ(again, r);
    ASSERT_TRUE(k::alpha_equal(bridge::decode_reflection(again), e)) << k::print_raw(e);
    ASSERT_EQ(k::print_raw(bridge::decode_reflection(r)), k::print_raw(e));
  }
}

TEST(Translate, FactorPipeline) {
  Real r;
  k::Expr e = r.elab("x^2 - 2*x + 1");
  cas::Expr X = bridge::reflect(r.local("x"));
  cas::Context ctx(cas::make_default_global(), cas::Context::Scope::Local);
  cas::Expr lf = bridge::lean_form(ctx, bridge::reflect(e));
  cas::Expr active = ctx.evaluate(cas::app("Activate", {lf}));
  EXPECT_EQ(cas::render(active), with_x("Plus[1, Times[-2, X], Power[X, 2]]", X));
  cas::Expr factored = ctx.evaluate(cas::app("Factor", {active}));
  EXPECT_EQ(cas::render(factored), with_x("Power[Plus[-1, X], 2]", X));
  k::Expr pre = bridge::pexpr_of_mmexpr(bridge::prelude_registry(), {}, factored);
  EXPECT_EQ(k::print_raw(pre), "pow_nat (add (neg one) x) (bit0 one)");
  k::Expr back = k::elaborate(k::prelude(), pre);
  EXPECT_EQ(k::type_check(k::prelude(), back), k::mk_const("real"));
}

TEST(Translate, ReflectedInputIsErasure) {
  Real r;
  for (const char* src : {"x + x", "x * y - 3", "x < y ∧ ¬ (y = 2)", "fun z, z + x"}) {
    k::Expr e = r.elab(src);
    k::Expr got = bridge::pexpr_of_mmexpr(bridge::prelude_registry(), {}, bridge::reflect(e));
    EXPECT_TRUE(k::alpha_equal(got, k::erase_to_pre(k::prelude(), e))) << src;
  }
}

TEST(Translate, Symbols) {
  const auto& reg = bridge::prelude_registry();
  EXPECT_EQ(bridge::pexpr_of_mmexpr(reg, {}, sym("Real")), k::mk_const("real"));
  EXPECT_EQ(bridge::pexpr_of_mmexpr(reg, {}, sym("True")), k::mk_const("true"));
  EXPECT_EQ(k::print_raw(bridge::pexpr_of_mmexpr(reg, {}, cas::integer(6))), "bit0 (bit1 one)");
  EXPECT_EQ(k::print_raw(bridge::pexpr_of_mmexpr(reg, {}, cas::integer(-1))), "neg one");
  EXPECT_EQ(k::print_raw(bridge::pexpr_of_mmexpr(reg, {}, cas::integer(0))), "zero");
  EXPECT_THROW(bridge::pexpr_of_mmexpr(reg, {}, sym("Unbound")), NoApplicableRule);
  EXPECT_THROW(bridge::pexpr_of_mmexpr(reg, {}, cas::real(0.5)), NoApplicableRule);
  bridge::TransEnv env{{"a", k::mk_local("_uniq.a", "a", k::BinderInfo::Default, k::mk_const("real"))}};
  EXPECT_EQ(k::print_raw(bridge::pexpr_of_mmexpr(reg, env, cas::parse("Power[a, -2]"))), "div one (pow_nat a (bit0 one))");
  EXPECT_EQ(k::print_raw(bridge::pexpr_of_mmexpr(reg, env, cas::parse("Power[a, -1]"))), "div one a");
}

TEST(Translate, HoldSplice) {
  const auto& reg = bridge::prelude_registry();
  bridge::TransEnv env;
  for (const char* n : {"x", "y", "z"}) env[n] = k::mk_local(k::fresh_unique_name(), n, k::BinderInfo::Default, k::mk_const("real"));
  k::Expr plain = bridge::pexpr_of_mmexpr(reg, env, cas::parse("Plus[x, y, z]"));
  k::Expr held = bridge::pexpr_of_mmexpr(reg, env, cas::parse("Plus[Hold[x, y, z]]"));
  EXPECT_EQ(held, plain);
  EXPECT_EQ(k::print_raw(plain), "add (add x y) z");
  EXPECT_EQ(bridge::pexpr_of_mmexpr(reg, env, cas::parse("Plus[x, Hold[y, z]]")), plain);
}

TEST(Translate, Binders) {
  const auto& reg = bridge::prelude_registry();
  k::Expr f = bridge::pexpr_of_mmexpr(reg, {}, cas::parse("Function[x, Plus[x, x]]"));
  ASSERT_EQ(f.kind(), k::ExprKind::Lam);
  EXPECT_EQ(k::print_raw(f.body()), "add #0 #0");
  EXPECT_FALSE(has_local(f));
  k::Expr g = bridge::pexpr_of_mmexpr(reg, {}, cas::parse("Function[{a, b}, Subtract[a, b]]"));
  EXPECT_EQ(k::print_raw(g.body().body()), "sub #1 #0");
  k::Expr all = bridge::pexpr_of_mmexpr(reg, {}, cas::parse("ForAll[x, Element[x, Reals], Greater[Power[x, 2], -1]]"));
  EXPECT_EQ(all.kind(), k::ExprKind::Pi);
  EXPECT_EQ(all.type(), k::mk_const("real"));
  EXPECT_FALSE(has_local(all));
  EXPECT_EQ(k::type_check(k::prelude(), k::elaborate(k::prelude(), all)), k::mk_prop());
  k::Expr ex = bridge::pexpr_of_mmexpr(reg, {}, cas::parse("Exists[y, Equal[y, 1]]"));
  EXPECT_FALSE(has_local(ex));
  // A pre-expression coming from Function elaborates at the expected type.
  k::Expr rr = k::mk_arrow(k::mk_const("real"), k::mk_const("real"));
  k::Expr el = k::elaborate(k::prelude(), f, rr);
  EXPECT_TRUE(k::alpha_equal(k::type_check(k::prelude(), el), rr));
}

TEST(Translate, LeanFormOfLambdaRoundTrips) {
  Real r;
  k::Expr rr = k::mk_arrow(k::mk_const("real"), k::mk_const("real"));
  k::Expr e = k::elaborate(k::prelude(), k::parse_surface("fun t, t + t", r.sc), rr);
  cas::Context ctx(cas::make_default_global(), cas::Context::Scope::Local);
  cas::Expr lf = bridge::lean_form(ctx, bridge::reflect(e));
  EXPECT_EQ(cas::render(lf), "Function[s0, Inactive[Plus][s0, s0]]");
  k::Expr back = k::elaborate(k::prelude(), bridge::pexpr_of_mmexpr(bridge::prelude_registry(), {}, lf), rr);
  EXPECT_TRUE(k::alpha_equal(back, e));
}

TEST(Registry, KeyedFallThroughAndOrder) {
  using bridge::KeyedAppRule;
  auto reg = bridge::prelude_registry();
  int calls = 0;
  auto failing = reg.with(KeyedAppRule{"Plus", [&](const bridge::RuleRegistry&, const bridge::TransEnv&,
                                                   const std::vector<cas::Expr>&) -> k::Expr {
    ++calls;
    throw NoApplicableRule("declined");
  }});
  EXPECT_EQ(k::print_raw(bridge::pexpr_of_mmexpr(failing, {}, cas::parse("Plus[1, 1]"))), "add one one");
  EXPECT_EQ(calls, 0);  // built-in Plus is registered first and succeeds
  auto custom = reg.with(KeyedAppRule{"Gamma", [](const bridge::RuleRegistry&, const bridge::TransEnv&,
                                                  const std::vector<cas::Expr>&) -> k::Expr {
    throw NoApplicableRule("first declines");
  }}).with(KeyedAppRule{"Gamma", [](const bridge::RuleRegistry& r, const bridge::TransEnv& env,
                                    const std::vector<cas::Expr>& args) {
    return k::mk_app(k::mk_const("real.sqrt"), bridge::pexpr_of_mmexpr(r, env, args.at(0)));
  }});
  EXPECT_EQ(k::print_raw(bridge::pexpr_of_mmexpr(custom, {}, cas::parse("Gamma[2]"))), "real.sqrt (bit0 one)");
  EXPECT_THROW(bridge::pexpr_of_mmexpr(reg, {}, cas::parse("Gamma[2]")), NoApplicableRule);
  try {
    bridge::pexpr_of_mmexpr(reg, {}, cas::parse("Gamma[2]"));
  } catch (const NoApplicableRule& e) {
    EXPECT_NE(std::string(e.what()).find("Gamma"), std::string::npos) << e.what();
  }
}

TEST(Registry, FileMatchesProgrammatic) {
  bridge::RuleRegistry base;
  auto from_file = bridge::load_sym_rules_text(base, "# comment\nPi = real.pi\nE = real.exp\n");
  auto by_hand = base.with(bridge::SymRule{"Pi", k::mk_const("real.pi")}).with(bridge::SymRule{"E", k::mk_const("real.exp")});
  for (const char* s : {"Pi", "E"}) {
    EXPECT_EQ(bridge::pexpr_of_mmexpr(from_file, {}, sym(s)), bridge::pexpr_of_mmexpr(by_hand, {}, sym(s)));
  }
  EXPECT_THROW(bridge::load_sym_rules_text(base, "Pi real.pi\n"), SyntaxError);
  EXPECT_EQ(bridge::prelude_registry().sym_rules().size() >= 6, true);
}
