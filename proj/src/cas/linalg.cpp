#include "casbridge/cas/linalg.hpp"

#include "casbridge/cas/number.hpp"
#include "casbridge/error.hpp"

namespace casbridge::cas {

LUResult lu_decompose(const Matrix& m) {
  const std::size_t n = m.size();
  for (const auto& row : m) {
    if (row.size() != n) throw NotSquare("matrix is not square");
  }
  if (n == 0) throw NotSquare("empty matrix");
  Matrix L(n, std::vector<mpq_class>(n, 0));
  Matrix U(n, std::vector<mpq_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      mpq_class s = m[i][k];
      for (std::size_t j = 0; j < i; ++j) s -= L[i][j] * U[j][k];
      U[i][k] = s;
    }
    if (U[i][i] == 0) throw ZeroPivot("zero pivot at row " + std::to_string(i + 1) + "; pivoting is not supported");
    L[i][i] = 1;
    for (std::size_t k = i + 1; k < n; ++k) {
      mpq_class s = m[k][i];
      for (std::size_t j = 0; j < i; ++j) s -= L[k][j] * U[j][i];
      L[k][i] = s / U[i][i];
    }
  }
  return {L, U};
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.empty() || b.empty()) return {};
  std::size_t n = a.size(), k = b.size(), p = b[0].size();
  Matrix r(n, std::vector<mpq_class>(p, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != k) throw NotSquare("dimension mismatch in matrix product");
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t t = 0; t < k; ++t) r[i][j] += a[i][t] * b[t][j];
    }
  }
  return r;
}

bool is_unit_lower_triangular(const Matrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != m.size() || m[i][i] != 1) return false;
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (m[i][j] != 0) return false;
    }
  }
  return true;
}

bool is_upper_triangular(const Matrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != m.size()) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (m[i][j] != 0) return false;
    }
  }
  return true;
}

std::optional<Matrix> matrix_from_expr(const Expr& e) {
  if (!e.is_app("List") || e.arity() == 0) return std::nullopt;
  Matrix m;
  for (const auto& row : e.args()) {
    if (!row.is_app("List")) return std::nullopt;
    std::vector<mpq_class> r;
    for (const auto& x : row.args()) {
      auto q = as_rational(x);
      if (!q) return std::nullopt;
      r.push_back(*q);
    }
    if (!m.empty() && r.size() != m[0].size()) return std::nullopt;
    m.push_back(std::move(r));
  }
  return m;
}

Expr matrix_to_expr(const Matrix& m) {
  std::vector<Expr> rows;
  for (const auto& r : m) {
    std::vector<Expr> xs;
    for (const auto& q : r) xs.push_back(from_rational(q));
    rows.push_back(list(std::move(xs)));
  }
  return list(std::move(rows));
}

}  // namespace casbridge::cas
