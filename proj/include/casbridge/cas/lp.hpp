#pragma once

#include <optional>
#include <vector>

#include "casbridge/cas/expr.hpp"
#include "casbridge/cas/linalg.hpp"

namespace casbridge::cas {

enum class Sense { Le, Eq, Ge };

struct LPResult {
  enum Status { Optimal, Infeasible, Unbounded } status = Infeasible;
  std::vector<mpq_class> x;
  mpq_class value;
};

/// Maximize c.x subject to A x (sense) b and x >= 0. Exact two-phase simplex
/// with Bland's rule.
LPResult lp_maximize(const Matrix& A, const std::vector<Sense>& senses, const std::vector<mpq_class>& b,
                     const std::vector<mpq_class>& c);

enum class Rel { Le, Lt, Eq };

/// a.x + k (rel) 0
struct LinRow {
  std::vector<mpq_class> a;
  mpq_class k;
  Rel rel = Rel::Le;
};

/// A point over free rational variables satisfying every row, or nullopt.
std::optional<std::vector<mpq_class>> find_point(std::size_t nvars, const std::vector<LinRow>& rows);

/// Nonnegative multipliers (free for equalities) whose combination of the
/// rows is a contradiction `q < 0` or `q <= 0` with q a positive constant, or
/// `0 < 0`. Integer valued with gcd 1; nullopt if the rows are satisfiable.
std::optional<std::vector<mpz_class>> farkas_certificate(std::size_t nvars, const std::vector<LinRow>& rows);

/// Rows for one relation (Less, LessEqual, Greater, GreaterEqual, Equal;
/// chains are split). Throws UnsupportedFragment for nonlinear terms or
/// symbols outside `vars`.
std::vector<LinRow> linear_rows(const Expr& relation, const std::vector<Expr>& vars);

/// Satisfying assignment for a boolean combination (And, Or, Not, List,
/// True, False, Unequal) of linear relations, or nullopt.
std::optional<std::vector<mpq_class>> find_instance(const Expr& constraints, const std::vector<Expr>& vars);

}  // namespace casbridge::cas
