#include <gtest/gtest.h>

#include <random>

#include "casbridge/cas/parse.hpp"
#include "casbridge/cas/wire.hpp"
#include "casbridge/error.hpp"

using namespace casbridge;
using namespace casbridge::cas;

namespace {

Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 4 : 7);
  static const char* syms[] = {"x", "Plus", "LeanConst", "a1", "$ctx$f", "List", "Times", "F"};
  switch (pick(rng)) {
    case 0: return sym(syms[rng() % 8]);
    case 1: {
      std::string s;
      static const char* alphabet[] = {"a", "b", " ", "\"", "\\", "\n", "\t", ".", "é"};
      for (int i = rng() % 6; i > 0; --i) s += alphabet[rng() % 9];
      return str(s);
    }
    case 2: {
      mpz_class v = static_cast<unsigned long>(rng());
      if (rng() % 3 == 0) v *= v * v;
      if (rng() % 2) v = -v;
      return integer(v);
    }
    case 3: {
      double d = std::ldexp(static_cast<double>(rng() % 1000000) - 500000, static_cast<int>(rng() % 80) - 40);
      return real(d);
    }
    case 4: return integer(static_cast<long>(rng() % 7));
    default: {
      Expr head = rng() % 5 == 0 ? random_expr(rng, depth - 1) : sym(syms[rng() % 8]);
      std::vector<Expr> args;
      for (int i = rng() % 4; i > 0; --i) args.push_back(random_expr(rng, depth - 1));
      return app(head, args);
    }
  }
}

}  // namespace

TEST(Render, FullForm) {
  EXPECT_EQ(render(app("Plus", {sym("x"), sym("y")})), "Plus[x, y]");
  EXPECT_EQ(render(integer(0)), "0");
  EXPECT_EQ(render(app("LeanConst", {str("real"), list({})})), "LeanConst[\"real\", List[]]");
  EXPECT_EQ(render(real(1.0)), "1.");
  EXPECT_EQ(render(real(0.1)), "0.1");
  EXPECT_EQ(render(real(1e300)), "1.e+300");
}

TEST(Parse, RenderRoundTripFuzz) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    Expr e = random_expr(rng, 4);
    std::string s = render(e);
    ASSERT_EQ(parse(s), e) << s;
  }
}

TEST(Wire, RoundTripFuzz) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10000; ++i) {
    Expr e = random_expr(rng, 4);
    auto j = to_wire(e);
    ASSERT_EQ(from_wire(nlohmann::json::parse(j.dump())), e) << j.dump();
  }
}

TEST(Wire, BigIntegerAsDecimalString) {
  mpz_class two100;
  mpz_ui_pow_ui(two100.get_mpz_t(), 2, 100);
  // Oracle: decimal expansion by repeated doubling on a digit string.
  std::string digits = "1";
  for (int i = 0; i < 100; ++i) {
    int carry = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
      int d = (*it - '0') * 2 + carry;
      *it = static_cast<char>('0' + d % 10);
      carry = d / 10;
    }
    if (carry) digits.insert(digits.begin(), static_cast<char>('0' + carry));
  }
  EXPECT_EQ(digits, "1267650600228229401496703205376");
  EXPECT_EQ(to_wire(integer(two100)).dump(), "{\"k\":\"int\",\"v\":\"" + digits + "\"}");
  EXPECT_EQ(to_wire(sym("Plus")).dump(), "{\"k\":\"sym\",\"v\":\"Plus\"}");
}

TEST(Wire, RejectsMalformed) {
  using nlohmann::json;
  EXPECT_THROW(from_wire(json::parse(R"({"k":"int","v":12})")), WireError);
  EXPECT_THROW(from_wire(json::parse(R"({"k":"int","v":"1x"})")), WireError);
  EXPECT_THROW(from_wire(json::parse(R"({"k":"app","h":{"k":"sym","v":"f"}})")), WireError);
  EXPECT_THROW(from_wire(json::parse(R"({"k":"blob"})")), WireError);
  EXPECT_THROW(from_wire(json::parse(R"([1,2])")), WireError);
}

TEST(Parse, InfixSugar) {
  Expr e = parse("x^2 - 2x + 1 // Factor");
  Expr expected = app("Factor", {app("Plus", {app("Power", {sym("x"), integer(2)}),
                                              app("Times", {integer(-2), sym("x")}), integer(1)})});
  EXPECT_EQ(e, expected);
  EXPECT_EQ(parse("F[2, 3]"), app("F", {integer(2), integer(3)}));
  EXPECT_EQ(parse("{1, {2}}"), list({integer(1), list({integer(2)})}));
  EXPECT_EQ(render(parse("a/b")), "Times[a, Power[b, -1]]");
  EXPECT_EQ(render(parse("-x^2")), "Times[-1, Power[x, 2]]");
  EXPECT_EQ(render(parse("-2^2")), "Times[-1, Power[2, 2]]");
  EXPECT_EQ(render(parse("a - b")), "Plus[a, Times[-1, b]]");
  EXPECT_EQ(render(parse("x > 0 && !(y <= 1) || z == 2")),
            "Or[And[Greater[x, 0], Not[LessEqual[y, 1]]], Equal[z, 2]]");
  EXPECT_EQ(render(parse("F[x_, y_] := x + y")),
            "SetDelayed[F[Pattern[x, Blank[]], Pattern[y, Blank[]]], Plus[x, y]]");
  EXPECT_EQ(render(parse("a = 1; a")), "CompoundExpression[Set[a, 1], a]");
  EXPECT_EQ(render(parse("m[[2, 1]]")), "Part[m, 2, 1]");
  EXPECT_EQ(render(parse("f[g[x]]")), "f[g[x]]");
  EXPECT_EQ(render(parse("x -> 1 (* comment *)")), "Rule[x, 1]");
  EXPECT_EQ(render(parse("n_Integer")), "Pattern[n, Blank[Integer]]");
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse("F[1, ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
  }
  EXPECT_THROW(parse("1 + @"), ParseError);
  EXPECT_THROW(parse("\"abc"), ParseError);
  EXPECT_THROW(parse("a < b > c"), ParseError);
}
