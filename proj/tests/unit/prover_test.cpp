#include <gtest/gtest.h>

#include <random>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/prover/prover.hpp"

#include "support/oracles.hpp"

using namespace casbridge;
using namespace casbridge::prover;
using kernel::Expr;
using F = PropFormula;
using namespace casbridge::test_support;

namespace {

void expect_checks(const Expr& proof, const Expr& stmt) {
  kernel::TypeChecker tc(kernel::prelude());
  EXPECT_NO_THROW(tc.check(proof, stmt)) << kernel::print_raw(proof);
}

void expect_explode_replays(const Expr& proof, const Expr& stmt) {
  const auto& env = kernel::prelude();
  auto steps = explode(env, proof);
  ASSERT_FALSE(steps.empty());
  kernel::TypeChecker tc(env);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    EXPECT_EQ(steps[i].index, i);
    for (auto a : steps[i].args) EXPECT_LT(a, i);
  }
  EXPECT_TRUE(tc.is_def_eq(steps.back().goal, stmt));
  Expr rebuilt = replay_explode(env, steps);
  EXPECT_NO_THROW(tc.check(rebuilt, stmt)) << render_explode(env, steps);
}

void count_kernel_constants(const Expr& e, std::map<std::string, int>& out) {
  static const std::map<std::string, std::string> names{
      {"and.intro", "AndIntro"},     {"and.elim_left", "AndElimLeft"}, {"and.elim_right", "AndElimRight"},
      {"or.inl", "OrIntroLeft"},     {"or.inr", "OrIntroRight"},       {"or.elim", "OrElim"},
      {"false.elim", "FalseElim"}};
  switch (e.kind()) {
    case kernel::ExprKind::Const:
      if (auto it = names.find(e.name().str()); it != names.end()) ++out[it->second];
      return;
    case kernel::ExprKind::App:
      count_kernel_constants(e.fn(), out);
      count_kernel_constants(e.arg(), out);
      return;
    case kernel::ExprKind::Lam:
      count_kernel_constants(e.body(), out);
      return;
    default: return;
  }
}

void count_cas_heads(const cas::Expr& e, std::map<std::string, int>& out) {
  static const std::set<std::string> heads{"AndIntro", "AndElimLeft", "AndElimRight", "OrIntroLeft",
                                           "OrIntroRight", "OrElim", "FalseElim"};
  if (!e.is_app()) return;
  if (e.head().is_sym() && heads.count(e.head().name())) ++out[e.head().name()];
  for (const auto& a : e.args()) count_cas_heads(a, out);
}

// Proof skeleton: binders without their types, constants without their
// proposition parameters.
std::string shape(const Expr& e) {
  static const std::map<std::string, std::size_t> params{{"and.intro", 2}, {"and.elim_left", 2}, {"and.elim_right", 2},
                                                         {"or.inl", 2},    {"or.inr", 2},        {"or.elim", 3},
                                                         {"false.elim", 1}};
  switch (e.kind()) {
    case kernel::ExprKind::Var: return "#" + std::to_string(e.var_index());
    case kernel::ExprKind::Lam: return "(λ " + shape(e.body()) + ")";
    case kernel::ExprKind::App: {
      const Expr& f = kernel::app_fn(e);
      auto args = kernel::app_args(e);
      std::size_t skip = 0;
      std::string out = "(";
      if (f.is_const() && params.count(f.name().str())) {
        skip = params.at(f.name().str());
        out += f.name().str();
      } else {
        out += shape(f);
      }
      for (std::size_t i = skip; i < args.size(); ++i) out += " " + shape(args[i]);
      return out + ")";
    }
    default: return kernel::print_raw(e);
  }
}

}  // namespace

TEST(Intuit, AgreesWithKripkeOracle) {
  std::mt19937 rng(11);
  int proved = 0;
  for (int i = 0; i < 1000; ++i) {
    F f = random_formula(rng, 1 + rng() % 10);
    ASSERT_LE(f.size(), 10u);
    AtomTable atoms;
    auto proof = intuit(f, atoms);
    bool valid = kripke_valid(f);
    ASSERT_EQ(proof.has_value(), valid) << to_string(f);
    if (proof) {
      ++proved;
      Expr stmt = encode(f, atoms);
      expect_checks(*proof, stmt);
      expect_explode_replays(*proof, stmt);
    }
  }
  EXPECT_GT(proved, 50);
}

TEST(Intuit, SoundOnLargerFormulas) {
  std::mt19937 rng(12);
  for (int i = 0; i < 1000; ++i) {
    F f = random_formula(rng, 1 + rng() % 12);
    AtomTable atoms;
    if (auto proof = intuit(f, atoms)) expect_checks(*proof, encode(f, atoms));
  }
}

TEST(Intuit, OrImpliesNotNotAndPeirce) {
  AtomTable atoms;
  F f = or_not_and_not();
  auto proof = intuit(f, atoms);
  ASSERT_TRUE(proof);
  expect_checks(*proof, encode(f, atoms));
  expect_explode_replays(*proof, encode(f, atoms));
  EXPECT_FALSE(intuit(peirce(), atoms));
  EXPECT_FALSE(kripke_valid(peirce()));
  EXPECT_FALSE(intuit(F::disj(F::atom("P"), F::neg(F::atom("P"))), atoms));
}

TEST(Intuit, IdentityProof) {
  AtomTable atoms;
  auto proof = intuit(F::implies(F::atom("P"), F::atom("P")), atoms);
  ASSERT_TRUE(proof);
  ASSERT_EQ(proof->kind(), kernel::ExprKind::Lam);
  EXPECT_EQ(proof->body().kind(), kernel::ExprKind::Var);
}

TEST(Formula, KernelRoundTrip) {
  std::mt19937 rng(13);
  for (int i = 0; i < 200; ++i) {
    F f = random_formula(rng, 1 + rng() % 10);
    AtomTable atoms;
    Expr e = encode(f, atoms);
    EXPECT_EQ(prop_of_kernel(kernel::prelude(), e, atoms), f) << to_string(f);
  }
  AtomTable atoms;
  EXPECT_THROW(prop_of_kernel(kernel::prelude(), kernel::mk_const("real"), atoms), TranslationFailed);
}

TEST(CasCalculus, IdentityAndOrNotAndNot) {
  AtomTable atoms;
  auto id = intuit(F::implies(F::atom("P"), F::atom("P")), atoms);
  ASSERT_TRUE(id);
  EXPECT_EQ(cas::render(to_cas_calculus(*id)), "ImpIntro[h, Hyp[h]]");

  auto proof = intuit(or_not_and_not(), atoms);
  ASSERT_TRUE(proof);
  cas::Expr tree = to_cas_calculus(*proof);
  std::map<std::string, int> kernel_counts, cas_counts;
  count_kernel_constants(*proof, kernel_counts);
  count_cas_heads(tree, cas_counts);
  EXPECT_EQ(kernel_counts, cas_counts) << cas::render(tree);
  EXPECT_GT(cas_counts["OrElim"], 0);
  EXPECT_NE(cas::render(tree).find("ImpElim["), std::string::npos);

  // Ex falso shows up once a goal other than false needs it.
  F p = F::atom("P"), q = F::atom("Q");
  auto efq = intuit(F::implies(F::conj(p, F::neg(p)), q), atoms);
  ASSERT_TRUE(efq);
  kernel_counts.clear();
  cas_counts.clear();
  count_kernel_constants(*efq, kernel_counts);
  count_cas_heads(to_cas_calculus(*efq), cas_counts);
  EXPECT_EQ(kernel_counts, cas_counts);
  EXPECT_EQ(cas_counts["FalseElim"], 1);
  EXPECT_THROW(to_cas_calculus(kernel::mk_const("lt_irrefl")), UnsupportedProofConstant);
}

TEST(CasCalculus, DistinctProofsGiveDistinctTrees) {
  std::mt19937 rng(14);
  std::map<std::string, std::string> seen;
  auto eval = tactics::local_cas();
  for (int i = 0; i < 150; ++i) {
    F f = random_formula(rng, 1 + rng() % 8);
    AtomTable atoms;
    auto proof = intuit(f, atoms);
    if (!proof) continue;
    std::string term = shape(*proof);
    std::string tree = cas::render(to_cas_calculus(*proof, eval));
    auto [it, fresh] = seen.emplace(tree, term);
    if (!fresh) EXPECT_EQ(it->second, term) << tree;
  }
}

TEST(Explode, IdentityHasThreeSteps) {
  AtomTable atoms;
  Expr p = atoms.get("P");
  auto proof = intuit(F::implies(F::atom("P"), F::atom("P")), atoms);
  ASSERT_TRUE(proof);
  auto steps = explode(kernel::prelude(), *proof);
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(steps[0].rule, "assumption");
  EXPECT_EQ(steps[0].hyp, "h");
  EXPECT_TRUE(kernel::alpha_equal(steps[0].goal, p));
  EXPECT_EQ(steps[1].rule, "h");
  EXPECT_EQ(steps[1].args, std::vector<std::size_t>{0});
  EXPECT_EQ(steps[2].rule, "→I");
  EXPECT_EQ(steps[2].args, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(kernel::alpha_equal(steps[2].goal, kernel::mk_arrow(p, p)));
  EXPECT_EQ(steps[2].depth, 0u);
  EXPECT_EQ(steps[1].depth, 1u);
}

TEST(Explode, PreludeTheoremsReplay) {
  const auto& env = kernel::prelude();
  for (const char* n : {"id_prop", "and.swap", "or.swap"}) {
    const auto* d = env.find(n);
    ASSERT_TRUE(d && d->value) << n;
    expect_explode_replays(*d->value, d->type);
    auto steps = explode(env, *d->value);
    EXPECT_EQ(steps.back().rule, "∀I") << n;
  }
  EXPECT_THROW(explode(env, kernel::mk_const("real")), IllTypedProof);
}

TEST(Explode, TamperedRowsAreRejected) {
  const auto& env = kernel::prelude();
  const auto* d = env.find("and.swap");
  auto steps = explode(env, *d->value);
  auto bad = steps;
  bad.back().goal = kernel::mk_const("false");
  EXPECT_THROW(replay_explode(env, bad), IllTypedProof);
  bad = steps;
  for (auto& s : bad) {
    if (!s.args.empty()) {
      s.args[0] = s.index;
      break;
    }
  }
  EXPECT_THROW(replay_explode(env, bad), IllTypedProof);
}

TEST(DeclInfo, PreludeTheorem) {
  const auto& env = kernel::prelude();
  DeclInfo info = get_decl_info(env, kernel::Name("and.swap"));
  EXPECT_EQ(info.name, "and.swap");
  EXPECT_EQ(info.kind, "theorem");
  ASSERT_TRUE(info.doc);
  EXPECT_EQ(*info.doc, "Conjunction is commutative.");
  EXPECT_FALSE(info.type.empty());
  EXPECT_TRUE(kernel::alpha_equal(bridge::decode_reflection(info.type_expr), env.find("and.swap")->type));
  EXPECT_EQ(get_decl_info(env, kernel::Name("and.intro")).kind, "axiom");
  EXPECT_THROW(get_decl_info(env, kernel::Name("no.such.thing")), UnknownDeclaration);
}

TEST(ProveForCas, Examples) {
  const auto& env = kernel::prelude();
  auto r = prove_for_cas(env, cas::parse("Implies[P, P]"), "intuit");
  EXPECT_EQ(r.status, "proved");
  EXPECT_EQ(cas::render(r.proof), "ImpIntro[h, Hyp[h]]");

  r = prove_for_cas(env, cas::parse("Implies[Or[P, Q], Not[And[Not[P], Not[Q]]]]"), "intuit");
  EXPECT_EQ(r.status, "proved");
  EXPECT_FALSE(r.explode.empty());
  kernel::TypeChecker tc(env);
  EXPECT_TRUE(tc.is_def_eq(r.explode.back().goal, r.statement));
  EXPECT_NO_THROW(tc.check(replay_explode(env, r.explode), r.statement));

  EXPECT_THROW(prove_for_cas(env, cas::parse("Implies[Implies[Implies[P, Q], P], P]"), "intuit"), TacticFailed);
  EXPECT_THROW(prove_for_cas(env, cas::parse("Equal[1, 2]"), "norm_num"), TacticFailed);
  EXPECT_EQ(prove_for_cas(env, cas::parse("Less[1, 2]"), "norm_num").status, "proved");
  EXPECT_EQ(prove_for_cas(env, cas::parse("Equal[(x + 1)^2, x^2 + 2 x + 1]"), "ring").status, "proved");
  EXPECT_THROW(prove_for_cas(env, cas::parse("Equal[(x + 1)^2, x^2 + 1]"), "ring"), TacticFailed);
  EXPECT_EQ(prove_for_cas(env, cas::parse("Implies[And[Less[x, 1], Less[2, x]], False]"), "linarith").status, "proved");
  EXPECT_EQ(prove_for_cas(env, cas::parse("Implies[Less[x, 1], Less[x, 2]]"), "linarith").status, "proved");
  EXPECT_THROW(prove_for_cas(env, cas::parse("Implies[Less[x, 2], Less[x, 1]]"), "linarith"), TacticFailed);
  EXPECT_THROW(prove_for_cas(env, cas::parse("Foo[\"s\"]"), "intuit"), TranslationFailed);
  EXPECT_THROW(prove_for_cas(env, cas::parse("Implies[P, P]"), "blast"), TacticFailed);
}
