#pragma once

#include <map>
#include <vector>

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

/// Sorted (variable, positive exponent) pairs.
using Monomial = std::vector<std::pair<Expr, unsigned long>>;

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial with rational coefficients. Variables are
/// arbitrary non-arithmetic expressions (symbols, `LeanLocal[...]`, `f[x]`).
class Poly {
 public:
  using Terms = std::map<Monomial, mpq_class, MonomialLess>;

  Poly() = default;
  static Poly constant(const mpq_class& c);
  static Poly variable(const Expr& v);
  /// Reads Plus/Times/Power (non-negative integer exponents) over exact
  /// numbers; any other subterm is a variable. Throws NotAPolynomial on
  /// reals and on negative or symbolic exponents of non-constants.
  static Poly from_expr(const Expr& e);

  /// Canonical CAS expression (as produced by the evaluator).
  Expr to_expr() const;

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  mpq_class constant_term() const;
  mpq_class coefficient(const Monomial& m) const;
  std::vector<Expr> variables() const;
  unsigned long total_degree() const;
  unsigned long degree(const Expr& var) const;
  bool is_homogeneous() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(const mpq_class& c) const;
  Poly pow(unsigned long n) const;
  /// Replace every occurrence of `var` by `value`.
  Poly substitute(const Expr& var, const Poly& value) const;

  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  void add_term(const Monomial& m, const mpq_class& c);

 private:
  Terms terms_;
};

}  // namespace casbridge::cas
