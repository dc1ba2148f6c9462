#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "casbridge/cas/parse.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/numeral.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/syntax.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/tactics/tactics.hpp"

#include "support/oracles.hpp"

using namespace casbridge;
using namespace casbridge::tactics;
namespace k = casbridge::kernel;
using namespace casbridge::test_support;

namespace {

struct Surface {
  k::SurfaceContext sc;
  Surface() {
    sc.env = &k::prelude();
    sc.default_type = k::mk_const("real");
  }
  k::Expr elab(const std::string& src) { return k::elaborate(k::prelude(), k::parse_surface(src, sc)); }
  k::Expr pre(const std::string& src) { return k::parse_surface(src, sc); }
};

const k::Environment& env() { return k::prelude(); }

CasEval& cas_eval() {
  static CasEval e = local_cas();
  return e;
}

}  // namespace

TEST(Ring, Examples) {
  Surface s;
  EXPECT_NO_THROW(eq_by_ring(env(), s.elab("x^2 - 2*x + 1"), s.elab("(x + -1)^2")));
  EXPECT_NO_THROW(eq_by_ring(env(), s.elab("x + 0"), s.elab("x")));
  EXPECT_NO_THROW(eq_by_ring(env(), s.elab("(x + y)^3"), s.elab("x^3 + 3*x^2*y + 3*x*y^2 + y^3")));
  EXPECT_NO_THROW(eq_by_ring(env(), s.elab("x / 2 + x / 2"), s.elab("x")));
  EXPECT_THROW(eq_by_ring(env(), s.elab("x + 1"), s.elab("x")), RingNormalizationFailed);
  EXPECT_THROW(eq_by_ring(env(), s.elab("x / y"), s.elab("x / y")), RingNormalizationFailed);
  auto r = eq_by_ring(env(), s.elab("x * y"), s.elab("y * x"));
  EXPECT_EQ(k::print_raw(k::erase_to_pre(env(), r.statement)), "eq (mul x y) (mul y x)");
  EXPECT_FALSE(r.trusted);
  try {
    eq_by_ring(env(), s.elab("x"), s.elab("y"));
  } catch (const RingNormalizationFailed& e) {
    EXPECT_NE(std::string(e.what()).find("unable to simplify"), std::string::npos);
  }
}

TEST(Ring, DistinctLocalsWithSameName) {
  k::Expr a = k::mk_local(k::fresh_unique_name(), "x", k::BinderInfo::Default, k::mk_const("real"));
  k::Expr b = k::mk_local(k::fresh_unique_name(), "x", k::BinderInfo::Default, k::mk_const("real"));
  EXPECT_THROW(eq_by_ring(env(), a, b), RingNormalizationFailed);
}

TEST(Ring, DifferentialAgainstEvaluation) {
  std::mt19937 rng(11);
  Surface s;
  std::vector<k::Expr> xs{s.elab("x"), s.elab("y"), s.elab("z")};
  int accepted = 0, rejected = 0;
  while (accepted < 500 || rejected < 500) {
    Tree seed = random_tree(rng, 3 + static_cast<int>(rng() % 2));
    Tree other = seed;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 8); i < n; ++i) other = rewrite(rng, other);
    k::Expr l = k::elaborate(env(), to_pre(seed, xs), k::mk_const("real"));
    if (accepted < 500) {
      k::Expr r = k::elaborate(env(), to_pre(other, xs), k::mk_const("real"));
      ASSERT_TRUE(trees_agree(seed, other, rng));
      EXPECT_NO_THROW(eq_by_ring(env(), l, r)) << k::print_raw(l) << " vs " << k::print_raw(r);
      ++accepted;
    }
    if (rejected < 500) {
      std::size_t nums = count_nums(other);
      if (nums == 0) continue;
      Tree mutated = other;
      std::size_t idx = rng() % nums;
      mutate_num(mutated, idx, 1 + static_cast<long>(rng() % 3));
      if (trees_agree(seed, mutated, rng)) continue;  // mutation cancelled out
      k::Expr r = k::elaborate(env(), to_pre(mutated, xs), k::mk_const("real"));
      EXPECT_THROW(eq_by_ring(env(), l, r), RingNormalizationFailed) << k::print_raw(l) << " vs " << k::print_raw(r);
      ++rejected;
    }
  }
}

TEST(Factor, SquareOfShift) {
  Surface s;
  auto start = std::chrono::steady_clock::now();
  k::Expr e = s.elab("x^2 - 2*x + 1");
  FactorResult r = factor_tactic(cas_eval(), env(), e);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(k::print_raw(k::erase_to_pre(env(), r.factored)), "pow_nat (add (neg one) x) (bit0 one)");
  EXPECT_EQ(r.proof.method, "ring");
  EXPECT_LT(secs, 1.0);
}

TEST(Factor, UnitAndTenthPowers) {
  Surface s;
  FactorResult five = factor_tactic(cas_eval(), env(), s.elab("5"));
  EXPECT_EQ(k::print_raw(k::erase_to_pre(env(), five.factored)), "bit1 (bit0 one)");
  auto start = std::chrono::steady_clock::now();
  FactorResult r = factor_tactic(cas_eval(), env(), s.elab("x^10 - y^10"));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(count_mul_factors(r.factored), 4u) << k::print_raw(k::erase_to_pre(env(), r.factored));
  EXPECT_LT(secs, 2.0);
  EXPECT_THROW(factor_tactic(cas_eval(), env(), s.elab("x*y + x")), StageError);
}

TEST(Farkas, CheckerExamples) {
  EXPECT_TRUE(check_farkas(three_hyp_system(), {{4, 2, 1}}));
  EXPECT_TRUE(check_farkas({atom({}, 1, LinRel::Le)}, {{1}}));
  EXPECT_FALSE(check_farkas({atom({{"x", 1}}, 0, LinRel::Le)}, {{1}}));
  EXPECT_FALSE(check_farkas(three_hyp_system(), {{0, 0, 0}}));
  EXPECT_FALSE(check_farkas(three_hyp_system(), {{4, 2}}));
  EXPECT_FALSE(check_farkas({atom({}, 1, LinRel::Le)}, {{-1}}));
  // x = 1, x >= 2 written as 2 - x <= 0: multiplier -1 on the equality.
  EXPECT_TRUE(check_farkas({atom({{"x", 1}}, -1, LinRel::Eq), atom({{"x", -1}}, 2, LinRel::Le)}, {{1, 1}}));
  EXPECT_TRUE(check_farkas({atom({{"x", -1}}, 1, LinRel::Eq), atom({{"x", -1}}, 2, LinRel::Le)}, {{-1, 1}}));
}

TEST(Farkas, RandomOraclesNeverFoolTheChecker) {
  std::mt19937 rng(21);
  int accepted = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<LinAtom> hyps;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 4); i < n; ++i) {
      std::map<std::string, mpq_class> t;
      for (const char* v : {"a", "b"}) {
        long c = static_cast<long>(rng() % 5) - 2;
        if (c) t[v] = c;
      }
      hyps.push_back(atom(t, static_cast<long>(rng() % 5) - 2, static_cast<LinRel>(rng() % 3)));
    }
    FarkasCertificate cert;
    for (std::size_t i = 0; i < hyps.size(); ++i) cert.coeffs.emplace_back(static_cast<long>(rng() % 4));
    bool ok = check_farkas(hyps, cert);
    EXPECT_EQ(ok, naive_farkas(hyps, cert.coeffs));
    accepted += ok;
  }
  EXPECT_GT(accepted, 0);
}

TEST(Linarith, ThreeHypSystemBothOracles) {
  auto hyps = three_hyp_system();
  auto cas_cert = cas_oracle(cas_eval())(hyps);
  ASSERT_TRUE(cas_cert);
  ASSERT_EQ(cas_cert->coeffs.size(), 3u);
  mpq_class scale = cas_cert->coeffs[0] / 4;
  EXPECT_GT(scale, 0);
  EXPECT_EQ(cas_cert->coeffs[1], scale * 2);
  EXPECT_EQ(cas_cert->coeffs[2], scale);
  EXPECT_TRUE(naive_farkas(hyps, cas_cert->coeffs));
  auto fm_cert = fm_oracle()(hyps);
  ASSERT_TRUE(fm_cert);
  EXPECT_TRUE(naive_farkas(hyps, fm_cert->coeffs));
  for (const auto& oracle : {fm_oracle(), cas_oracle(cas_eval())}) {
    VerifiedResult v = linarith(hyps, oracle);
    EXPECT_EQ(v.statement, k::mk_const("false"));
    EXPECT_FALSE(v.trusted);
  }
}

TEST(Linarith, FromKernelHypotheses) {
  Surface s;
  std::vector<LinAtom> hyps;
  for (const char* h : {"2*x < 3*y", "-4*x + 2*z < 0", "12*y - 4*z < 0"}) hyps.push_back(lin_atom_of(env(), s.elab(h)));
  EXPECT_NO_THROW(linarith(hyps, cas_oracle(cas_eval())));
  EXPECT_NO_THROW(linarith(hyps, fm_oracle()));
  EXPECT_THROW(lin_atom_of(env(), s.elab("x ≠ y")), UnsupportedFragment);
  EXPECT_THROW(lin_atom_of(env(), s.elab("x * y < 1")), UnsupportedFragment);
  LinAtom g = lin_atom_of(env(), s.elab("x > 1"));
  EXPECT_EQ(g.rel, LinRel::Lt);
  EXPECT_EQ(g.constant, 1);
  ASSERT_EQ(g.terms.size(), 1u);
  EXPECT_EQ(g.terms.begin()->second, -1);
}

TEST(Linarith, Failures) {
  std::vector<LinAtom> sat{atom({{"x", 1}}, 0, LinRel::Le)};
  EXPECT_THROW(linarith(sat, fm_oracle()), OracleFailed);
  EXPECT_THROW(linarith(sat, cas_oracle(cas_eval())), OracleFailed);
  FarkasOracle garbage = [](const std::vector<LinAtom>& h) { return FarkasCertificate{std::vector<mpq_class>(h.size(), 1)}; };
  EXPECT_THROW(linarith(three_hyp_system(), garbage), CertificateRejected);
}

TEST(Linarith, OraclesAgreeOnProvability) {
  std::mt19937 rng(4);
  auto cas = cas_oracle(cas_eval());
  auto fm = fm_oracle();
  int refuted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<LinAtom> hyps;
    for (int i = 0, n = 2 + static_cast<int>(rng() % 4); i < n; ++i) {
      std::map<std::string, mpq_class> t;
      for (const char* v : {"a", "b", "c"}) {
        long c = static_cast<long>(rng() % 7) - 3;
        if (c) t[v] = c;
      }
      hyps.push_back(atom(t, static_cast<long>(rng() % 7) - 3, static_cast<LinRel>(rng() % 3)));
    }
    auto a = fm(hyps);
    auto b = cas(hyps);
    ASSERT_EQ(a.has_value(), b.has_value()) << trial;
    if (a) {
      EXPECT_TRUE(naive_farkas(hyps, a->coeffs));
      EXPECT_TRUE(naive_farkas(hyps, b->coeffs));
      ++refuted;
    }
  }
  EXPECT_GT(refuted, 20);
}

TEST(NormNum, Examples) {
  Surface s;
  k::Expr e = s.elab("2 + 2 = 4");
  EXPECT_TRUE(k::alpha_equal(norm_num(env(), e).statement, e));
  k::Expr f = s.elab("99/20 * 4 = 99/5");
  EXPECT_TRUE(k::alpha_equal(norm_num(env(), f).statement, f));
  k::Expr g = s.elab("1 < 0");
  VerifiedResult r = norm_num(env(), g);
  EXPECT_EQ(k::print_raw(k::erase_to_pre(env(), r.statement)), "not (lt one zero)");
  EXPECT_THROW(norm_num(env(), s.elab("x < 1")), NotGround);
  // Exact rational oracle.
  EXPECT_EQ(eval_ground(env(), s.elab("99/20 * 4")), mpq_class(99, 5));
  EXPECT_EQ(eval_ground(env(), s.elab("-7/3 + 1/6")), mpq_class(-13, 6));
}

TEST(SolvePolys, Examples) {
  Surface s;
  auto exists = [&](std::vector<std::string> names, const std::string& body) {
    k::Expr b = s.pre(body);
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
      k::Expr x = s.sc.locals.at(*it);
      b = k::mk_app(k::mk_const("Exists"), k::mk_lambda(*it, k::BinderInfo::Default, k::mk_const("real"), k::abstract(b, x)));
    }
    return k::elaborate(env(), b);
  };
  SolveResult one = solve_polys(cas_eval(), env(), exists({"x"}, "2*x = 6"));
  EXPECT_EQ(one.witnesses, std::vector<mpq_class>{3});
  SolveResult two = solve_polys(cas_eval(), env(), exists({"x", "y"}, "x + y = 3 ∧ x - y = 1"));
  // Cramer's rule on [[1,1],[1,-1]] (x,y) = (3,1).
  mpq_class det = -2;
  EXPECT_EQ(two.witnesses, (std::vector<mpq_class>{(3 * -1 - 1 * 1) / det, (1 * 1 - 3 * 1) / det}));
  EXPECT_EQ(two.checks.size(), 2u);
  EXPECT_THROW(solve_polys(cas_eval(), env(), exists({"x"}, "x^2 = 2")), UnsupportedSystem);
  EXPECT_THROW(solve_polys(cas_eval(), env(), exists({"x"}, "x + 1 = x")), NoSolution);
  EXPECT_THROW(solve_polys(cas_eval(), env(), s.elab("x = 1")), UnsupportedSystem);
}

TEST(LU, VandermondeAndTampering) {
  cas::Matrix m{{1, 2, 3}, {1, 4, 9}, {1, 8, 27}};
  LUCertificate c = lu_decomp_tactic(cas_eval(), env(), m);
  EXPECT_EQ(c.L, (cas::Matrix{{1, 0, 0}, {1, 1, 0}, {1, 3, 1}}));
  EXPECT_EQ(c.U, (cas::Matrix{{1, 2, 3}, {0, 2, 6}, {0, 0, 6}}));
  EXPECT_EQ(matmul_naive(c.L, c.U), m);
  cas::Matrix bad = c.U;
  bad[1][2] += 1;
  EXPECT_THROW(verify_lu(env(), m, c.L, bad), VerificationFailed);
  cas::Matrix lower = c.U;
  lower[2][0] = 1;
  EXPECT_THROW(verify_lu(env(), m, c.L, lower), VerificationFailed);
  LUCertificate unit = lu_decomp_tactic(cas_eval(), env(), {{5}});
  EXPECT_EQ(unit.L, (cas::Matrix{{1}}));
  EXPECT_EQ(unit.U, (cas::Matrix{{5}}));
  EXPECT_THROW(lu_decomp_tactic(cas_eval(), env(), {{0, 1}, {1, 0}}), ZeroPivot);
}

TEST(LU, RandomNonsingular) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 6;
    cas::Matrix m = random_lu_matrix(rng, n);
    LUCertificate c = lu_decomp_tactic(cas_eval(), env(), m);
    EXPECT_EQ(matmul_naive(c.L, c.U), m);
    EXPECT_FALSE(c.proof.trusted);
  }
}

TEST(Plausibility, Examples) {
  Surface s;
  Plausibility a = plausibility_check(cas_eval(), {s.elab("x > 1")}, s.elab("x > 0"));
  EXPECT_TRUE(a.passed());
  Plausibility b = plausibility_check(cas_eval(), {s.elab("x > 0")}, s.elab("x > 1"));
  ASSERT_EQ(b.status, Plausibility::Countermodel);
  // The witness satisfies the hypothesis and violates the goal.
  mpq_class x = b.countermodel.at("x");
  EXPECT_GT(x, 0);
  EXPECT_LE(x, 1);
  Plausibility c = plausibility_check(cas_eval(), {s.elab("x * x > 1")}, s.elab("x > 1"));
  EXPECT_EQ(c.status, Plausibility::Inconclusive);
  EXPECT_FALSE(c.passed());
  EXPECT_FALSE(c.reason.empty());
}

TEST(Trusted, AxiomatizeAndApprox) {
  Surface s;
  k::Expr stmt = s.elab("2 * 3 = 6");
  k::Environment e2 = axiomatize(env(), "cas.mul_fact", stmt, "Times[2, 3]");
  auto audit = e2.trusted_axioms();
  ASSERT_EQ(audit.size(), env().trusted_axioms().size() + 1);
  EXPECT_EQ(audit.back()->name, k::Name("cas.mul_fact"));
  EXPECT_EQ(*audit.back()->source, "Times[2, 3]");
  EXPECT_THROW(axiomatize(e2, "cas.mul_fact", stmt, "again"), DuplicateName);
  EXPECT_THROW(axiomatize(env(), "cas.bad", s.elab("2 + 3"), "x"), TypeError);

  Approximation ap = approx(cas_eval(), env(), "cas.third", s.elab("1 / 3"), 4);
  EXPECT_LT(ap.lo, mpq_class(1, 3));
  EXPECT_GT(ap.hi, mpq_class(1, 3));
  EXPECT_LT(ap.hi - ap.lo, mpq_class(1, 1000));
  EXPECT_EQ(ap.env.get("cas.third").kind, k::DeclKind::TrustedAxiom);
  EXPECT_EQ(k::print_raw(k::erase_to_pre(env(), ap.statement)).substr(0, 7), "and (lt");
}

TEST(RunCommand, TemplateHandling) {
  Surface s;
  k::Expr e = s.elab("x * (y + 1)");
  k::Expr same = k::elaborate(env(), run_command_using(cas_eval(), "%", e), k::mk_const("real"));
  EXPECT_TRUE(k::alpha_equal(same, e));
  int calls = 0;
  CasEval counting = [&](const std::string& src) {
    ++calls;
    return cas_eval()(src);
  };
  EXPECT_THROW(run_command_using(counting, "Factor[x]", e), StageError);
  EXPECT_THROW(run_command_using(counting, "% + %", e), StageError);
  EXPECT_EQ(calls, 0);
  k::Expr sq = run_command_using(counting, "double[Activate[LeanConvert[%]]]", s.elab("x"), std::string("(* aux *)\ndouble[a_] := 2*a\n"));
  EXPECT_EQ(k::print_raw(sq), "mul (bit0 one) x");
  EXPECT_EQ(calls, 1);
  // The auxiliary definition stays local to that request.
  EXPECT_EQ(cas::render(cas_eval()("double[3]")), "double[3]");
}
