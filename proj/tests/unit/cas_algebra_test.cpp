#include <gtest/gtest.h>

#include <random>

#include "casbridge/cas/canonical.hpp"
#include "casbridge/cas/factor.hpp"
#include "casbridge/cas/number.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/error.hpp"

using namespace casbridge;
using namespace casbridge::cas;

namespace {

// Independent evaluator: substitutes rationals for symbols and folds
// Plus/Times/Power directly.
mpq_class eval_at(const Expr& e, const std::map<std::string, mpq_class>& env) {
  if (auto q = as_rational(e)) return *q;
  if (e.is_sym()) return env.at(e.name());
  if (e.is_app("Plus")) {
    mpq_class s = 0;
    for (const auto& a : e.args()) s += eval_at(a, env);
    return s;
  }
  if (e.is_app("Times")) {
    mpq_class s = 1;
    for (const auto& a : e.args()) s *= eval_at(a, env);
    return s;
  }
  if (e.is_app("Power", 2)) {
    mpq_class b = eval_at(e.arg(0), env), r = 1;
    long n = e.arg(1).integer().get_si();
    for (long i = 0; i < std::labs(n); ++i) r *= b;
    return n < 0 ? mpq_class(1 / r) : r;
  }
  throw std::runtime_error("eval_at: " + render(e));
}

std::size_t count_factors(const Expr& e) {
  if (!e.is_app("Times")) return 1;
  std::size_t n = 0;
  for (const auto& a : e.args()) n += is_numeric(a) ? 0 : 1;
  return n;
}

}  // namespace

TEST(Canonical, PlusTimesPower) {
  EXPECT_EQ(render(canonical_plus({integer(2), integer(3)})), "5");
  EXPECT_EQ(render(canonical_plus({sym("Factor"), sym("Plus")})), "Plus[Factor, Plus]");
  Expr p = canonical_plus({app("Power", {sym("X"), integer(2)}), app("Times", {integer(-2), sym("X")}), integer(1)});
  EXPECT_EQ(render(p), "Plus[1, Times[-2, X], Power[X, 2]]");
  EXPECT_EQ(render(canonical_plus({sym("x"), sym("x")})), "Times[2, x]");
  EXPECT_EQ(render(canonical_plus({sym("x"), app("Times", {integer(-1), sym("x")})})), "0");
  EXPECT_EQ(render(canonical_times({sym("x"), sym("x")})), "Power[x, 2]");
  EXPECT_EQ(render(canonical_times({integer(2), app("Power", {integer(3), integer(-1)})})), "Rational[2, 3]");
  EXPECT_EQ(render(canonical_power(integer(4), app("Rational", {integer(1), integer(2)}))), "2");
  EXPECT_EQ(render(canonical_power(integer(2), app("Rational", {integer(1), integer(2)}))), "Power[2, Rational[1, 2]]");
  EXPECT_EQ(render(canonical_power(app("Power", {sym("x"), integer(2)}), integer(3))), "Power[x, 6]");
  EXPECT_EQ(render(canonical_plus({real(0.5), integer(1)})), "1.5");
}

TEST(Factor, SquareOfShift) {
  Expr x = sym("X");
  Expr e = canonical_plus({integer(1), app("Times", {integer(-2), x}), app("Power", {x, integer(2)})});
  EXPECT_EQ(render(factor(e)), "Power[Plus[-1, X], 2]");
}

TEST(Factor, TenthPowersDifference) {
  Expr f = factor(Poly::from_expr(parse("x^10 - y^10")).to_expr());
  ASSERT_TRUE(f.is_app("Times"));
  EXPECT_EQ(count_factors(f), 4u);
  std::set<std::string> got;
  for (const auto& a : f.args()) got.insert(render(a));
  std::set<std::string> expected;
  for (const char* s : {"x - y", "x + y", "x^4 - x^3 y + x^2 y^2 - x y^3 + y^4", "x^4 + x^3 y + x^2 y^2 + x y^3 + y^4"}) {
    expected.insert(render(Poly::from_expr(parse(s)).to_expr()));
  }
  EXPECT_EQ(got, expected);
}

TEST(Factor, IrreducibleAndConstant) {
  EXPECT_EQ(render(factor(sym("x"))), "x");
  EXPECT_EQ(render(factor(integer(5))), "5");
  EXPECT_EQ(render(factor(Poly::from_expr(parse("x^2 + 1")).to_expr())), "Plus[1, Power[x, 2]]");
  EXPECT_THROW(factor(Poly::from_expr(parse("x*y + x")).to_expr()), UnsupportedShape);
  EXPECT_THROW(factor(parse("x + 0.5")), NotAPolynomial);
}

TEST(Factor, RandomProductsMultiplyBack) {
  std::mt19937 rng(5);
  Expr x = sym("x");
  for (int trial = 0; trial < 500; ++trial) {
    Poly p = Poly::constant(mpq_class(static_cast<long>(rng() % 7) + 1, static_cast<long>(rng() % 3) + 1));
    int budget = 1 + static_cast<int>(rng() % 8);
    while (budget > 0) {
      int d = 1 + static_cast<int>(rng() % std::min(budget, 3));
      Poly f;
      for (int k = 0; k <= d; ++k) {
        long c = static_cast<long>(rng() % 9) - 4;
        if (k == d && c == 0) c = 1;
        f.add_term(k ? Monomial{{x, static_cast<unsigned long>(k)}} : Monomial{}, c);
      }
      p = p * f;
      budget -= d;
    }
    Expr input = p.to_expr();
    Expr out = factor(input);
    EXPECT_EQ(Poly::from_expr(out), p) << render(input) << " -> " << render(out);
    for (long v = -3; v <= 3; ++v) {
      ASSERT_EQ(eval_at(out, {{"x", v}}), eval_at(input, {{"x", v}})) << render(input);
    }
  }
}

TEST(Factor, CyclotomicTable) {
  Expr t = sym("t");
  // Oracle: t^n - 1 is the product of the cyclotomic polynomials of n's divisors.
  for (unsigned n = 1; n <= 24; ++n) {
    Poly prod = Poly::constant(1);
    for (unsigned d = 1; d <= n; ++d) {
      if (n % d == 0) prod = prod * cyclotomic(d, t);
    }
    EXPECT_EQ(prod, Poly::variable(t).pow(n) - Poly::constant(1)) << n;
  }
  Expr f = factor(Poly::from_expr(parse("t^12 + 1")).to_expr());
  EXPECT_EQ(count_factors(f), 2u) << render(f);
}

TEST(Factor, RationalRoots) {
  Expr x = sym("x");
  auto roots = rational_roots(Poly::from_expr(parse("6x^3 - 11x^2 + 6x - 1")), x);
  std::vector<mpq_class> expected{mpq_class(1, 3), mpq_class(1, 2), 1};
  EXPECT_EQ(roots, expected);
  EXPECT_TRUE(rational_roots(Poly::from_expr(parse("x^2 - 2")), x).empty());
}
