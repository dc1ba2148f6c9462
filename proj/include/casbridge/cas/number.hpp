#pragma once

#include <optional>

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

/// A CAS number: exact rational or machine real.
struct Number {
  bool exact = true;
  mpq_class q;
  double d = 0;

  static Number of(mpq_class v) { return Number{true, std::move(v), 0}; }
  static Number of(double v) { return Number{false, 0, v}; }
  double to_double() const { return exact ? q.get_d() : d; }
  bool is_zero() const { return exact ? q == 0 : d == 0; }
  bool is_one() const { return exact && q == 1; }
  int sign() const { return exact ? sgn(q) : (d > 0) - (d < 0); }
};

Number operator+(const Number& a, const Number& b);
Number operator*(const Number& a, const Number& b);
/// Three-way comparison by value.
int compare_values(const Number& a, const Number& b);

/// Int, Real or Rational[n, d] with integer n and nonzero integer d.
bool is_numeric(const Expr& e);
std::optional<Number> as_number(const Expr& e);
/// Int or Rational[n, d].
std::optional<mpq_class> as_rational(const Expr& e);
/// Canonical expression: Int when the denominator is 1, else Rational[n, d].
Expr from_rational(const mpq_class& q);
Expr from_number(const Number& n);

}  // namespace casbridge::cas
