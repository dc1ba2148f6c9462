#include <gtest/gtest.h>

#include <random>

#include "casbridge/cas/linalg.hpp"
#include "casbridge/cas/lp.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/cas/plot.hpp"
#include "casbridge/cas/solve.hpp"
#include "casbridge/error.hpp"

using namespace casbridge;
using namespace casbridge::cas;

namespace {

bool row_holds(const LinRow& r, const std::vector<mpq_class>& x) {
  mpq_class v = r.k;
  for (std::size_t j = 0; j < r.a.size(); ++j) v += r.a[j] * x[j];
  switch (r.rel) {
    case Rel::Le: return v <= 0;
    case Rel::Lt: return v < 0;
    case Rel::Eq: return v == 0;
  }
  return false;
}

// Sum the rows with the given multipliers and check that the result is a
// contradiction with no variables left.
bool farkas_sum_contradicts(const std::vector<LinRow>& rows, const std::vector<mpz_class>& c) {
  std::vector<mpq_class> a(rows.empty() ? 0 : rows[0].a.size(), 0);
  mpq_class k = 0;
  bool strict = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].rel != Rel::Eq && c[i] < 0) return false;
    for (std::size_t j = 0; j < a.size(); ++j) a[j] += c[i] * rows[i].a[j];
    k += c[i] * rows[i].k;
    if (rows[i].rel == Rel::Lt && c[i] > 0) strict = true;
  }
  for (const auto& v : a) {
    if (v != 0) return false;
  }
  return k > 0 || (k == 0 && strict);
}

std::vector<mpq_class> ints(std::initializer_list<long> xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST(LU, Vandermonde) {
  Matrix m{ints({1, 2, 3}), ints({1, 4, 9}), ints({1, 8, 27})};
  auto [L, U] = lu_decompose(m);
  EXPECT_EQ(L, (Matrix{ints({1, 0, 0}), ints({1, 1, 0}), ints({1, 3, 1})}));
  EXPECT_EQ(U, (Matrix{ints({1, 2, 3}), ints({0, 2, 6}), ints({0, 0, 6})}));
  EXPECT_EQ(render(matrix_to_expr(U)), "List[List[1, 2, 3], List[0, 2, 6], List[0, 0, 6]]");
  EXPECT_EQ(matrix_from_expr(parse("{{1, 2, 3}, {1, 4, 9}, {1, 8, 27}}")), m);
}

TEST(LU, RandomFactorsMultiplyBack) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 6;
    // Built as a product of known triangular factors so no pivot vanishes.
    Matrix L(n, std::vector<mpq_class>(n, 0)), U = L;
    for (std::size_t i = 0; i < n; ++i) {
      L[i][i] = 1;
      for (std::size_t j = 0; j < i; ++j) L[i][j] = static_cast<long>(rng() % 11) - 5;
      for (std::size_t j = i; j < n; ++j) U[i][j] = static_cast<long>(rng() % 11) - 5;
      if (U[i][i] == 0) U[i][i] = mpq_class(1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3));
    }
    Matrix A = matmul(L, U);
    auto r = lu_decompose(A);
    EXPECT_EQ(r.L, L);
    EXPECT_EQ(r.U, U);
    EXPECT_EQ(matmul(r.L, r.U), A);
    EXPECT_TRUE(is_unit_lower_triangular(r.L));
    EXPECT_TRUE(is_upper_triangular(r.U));
  }
}

TEST(LU, Errors) {
  EXPECT_THROW(lu_decompose(Matrix{ints({0, 1}), ints({1, 0})}), ZeroPivot);
  EXPECT_THROW(lu_decompose(Matrix{ints({1, 2})}), NotSquare);
  EXPECT_FALSE(matrix_from_expr(parse("{{1, 2}, {3}}")));
}

TEST(Simplex, SmallLP) {
  // max x + y, x + 2y <= 4, 3x + y <= 6
  auto r = lp_maximize({ints({1, 2}), ints({3, 1})}, {Sense::Le, Sense::Le}, ints({4, 6}), ints({1, 1}));
  ASSERT_EQ(r.status, LPResult::Optimal);
  EXPECT_EQ(r.value, mpq_class(14, 5));
  r = lp_maximize({ints({1, -1})}, {Sense::Le}, ints({1}), ints({1, 0}));
  EXPECT_EQ(r.status, LPResult::Unbounded);
  r = lp_maximize({ints({1, 1})}, {Sense::Ge}, ints({-1}), ints({0, 0}));
  EXPECT_EQ(r.status, LPResult::Optimal);
  r = lp_maximize({ints({1, 1}), ints({1, 1})}, {Sense::Le, Sense::Ge}, ints({1, 2}), ints({0, 0}));
  EXPECT_EQ(r.status, LPResult::Infeasible);
}

TEST(Farkas, ThreeHypSystem) {
  std::vector<LinRow> rows{{ints({2, -3, 0}), 0, Rel::Lt}, {ints({-4, 0, 2}), 0, Rel::Lt}, {ints({0, 12, -4}), 0, Rel::Lt}};
  EXPECT_FALSE(find_point(3, rows));
  auto c = farkas_certificate(3, rows);
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, (std::vector<mpz_class>{4, 2, 1}));
  EXPECT_TRUE(farkas_sum_contradicts(rows, *c));
}

TEST(Farkas, ExactlyOneSideOnRandomSystems) {
  std::mt19937 rng(17);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 4, m = 1 + rng() % 6;
    std::vector<LinRow> rows;
    for (std::size_t i = 0; i < m; ++i) {
      LinRow r{std::vector<mpq_class>(n), static_cast<long>(rng() % 7) - 3, static_cast<Rel>(rng() % 3)};
      if (r.rel == Rel::Eq && rng() % 2) r.rel = Rel::Lt;
      for (auto& a : r.a) a = static_cast<long>(rng() % 7) - 3;
      rows.push_back(std::move(r));
    }
    auto x = find_point(n, rows);
    auto c = farkas_certificate(n, rows);
    ASSERT_NE(x.has_value(), c.has_value()) << trial;
    if (x) {
      ++feasible;
      for (const auto& r : rows) ASSERT_TRUE(row_holds(r, *x)) << trial;
    } else {
      ++infeasible;
      ASSERT_TRUE(farkas_sum_contradicts(rows, *c)) << trial;
    }
  }
  EXPECT_GT(feasible, 30);
  EXPECT_GT(infeasible, 30);
}

TEST(FindInstance, BooleanStructure) {
  std::vector<Expr> xs{sym("x"), sym("y")};
  auto p = find_instance(parse("x != 0 && x > -1 && x < 1 && y == 2 x"), xs);
  ASSERT_TRUE(p);
  EXPECT_NE((*p)[0], 0);
  EXPECT_EQ((*p)[1], 2 * (*p)[0]);
  EXPECT_FALSE(find_instance(parse("x > 1 && (x < 0 || !(x >= -5))"), xs));
  EXPECT_TRUE(find_instance(parse("{x > 1, x < 3 || y > 0}"), xs));
  EXPECT_THROW(find_instance(parse("x^2 > 1"), xs), UnsupportedFragment);
  EXPECT_THROW(find_instance(parse("z > 1"), xs), UnsupportedFragment);
}

TEST(Solve, Systems) {
  Expr x = sym("x"), y = sym("y");
  auto P = [](const char* s) { return Poly::from_expr(parse(s)); };
  auto sols = solve_polys({P("x^2 - 3x + 2"), P("y - x^2")}, {x, y});
  std::vector<std::vector<mpq_class>> expected{ints({1, 1}), ints({2, 4})};
  EXPECT_EQ(sols, expected);
  sols = solve_polys({P("x + y - 3"), P("x - y - 1")}, {x, y});
  EXPECT_EQ(sols, (std::vector<std::vector<mpq_class>>{ints({2, 1})}));
  EXPECT_TRUE(solve_polys({P("x + y - 3"), P("x + y - 1")}, {x, y}).empty());
  EXPECT_THROW(solve_polys({P("x^2 - 2")}, {x}), UnsupportedSystem);
  EXPECT_THROW(solve_polys({P("x + y")}, {x, y}), UnsupportedSystem);
  EXPECT_THROW(solve_polys({P("x y - 1"), P("x^2 y + y^2 x - 2")}, {x, y}), UnsupportedSystem);
  // Substitute back as the oracle.
  sols = solve_polys({P("2x^2 - x - 1"), P("3y - 2x - 1")}, {x, y});
  ASSERT_EQ(sols.size(), 2u);
  for (const auto& s : sols) {
    EXPECT_EQ(2 * s[0] * s[0] - s[0] - 1, 0);
    EXPECT_EQ(3 * s[1] - 2 * s[0] - 1, 0);
  }
}

TEST(Plot, SymmetricParabola) {
  std::string svg = plot_svg([](const mpq_class& x) { return std::optional<double>(mpq_class(x * x).get_d()); }, -1, 1);
  auto start = svg.find("points=\"") + 8;
  std::string pts = svg.substr(start, svg.find('"', start) - start);
  std::vector<std::string> ys;
  for (std::size_t i = 0; i < pts.size();) {
    auto comma = pts.find(',', i), space = pts.find(' ', i);
    ys.push_back(pts.substr(comma + 1, (space == std::string::npos ? pts.size() : space) - comma - 1));
    i = space == std::string::npos ? pts.size() : space + 1;
  }
  ASSERT_EQ(ys.size(), 256u);
  for (std::size_t i = 0; i < 256; ++i) EXPECT_EQ(ys[i], ys[255 - i]);
  EXPECT_EQ(ys.front(), "10.000");
}
