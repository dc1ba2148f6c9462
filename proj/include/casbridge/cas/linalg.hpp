#pragma once

#include <optional>
#include <vector>

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

using Matrix = std::vector<std::vector<mpq_class>>;

struct LUResult {
  Matrix L;  // unit lower triangular
  Matrix U;  // upper triangular
};

/// Doolittle decomposition without pivoting. Throws NotSquare or ZeroPivot.
LUResult lu_decompose(const Matrix& m);

Matrix matmul(const Matrix& a, const Matrix& b);
bool is_unit_lower_triangular(const Matrix& m);
bool is_upper_triangular(const Matrix& m);

/// `List[List[...], ...]` of exact numbers, rectangular; nullopt otherwise.
std::optional<Matrix> matrix_from_expr(const Expr& e);
Expr matrix_to_expr(const Matrix& m);

}  // namespace casbridge::cas
