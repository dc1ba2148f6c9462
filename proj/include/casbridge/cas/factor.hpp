#pragma once

#include "casbridge/cas/poly.hpp"

namespace casbridge::cas {

struct Factorization {
  mpq_class content = 1;
  /// Primitive integer factors with positive leading coefficient, each with
  /// its multiplicity.
  std::vector<std::pair<Poly, unsigned long>> factors;

  Poly expand() const;
};

/// Factor a univariate or homogeneous bivariate polynomial over the
/// rationals: primitive part, square-free decomposition, rational roots,
/// cyclotomic trial division; whatever is left is kept as one factor.
/// Throws UnsupportedShape for other multivariate input.
Factorization factor_poly(const Poly& p);

/// Factor a CAS expression; the result is in evaluator-canonical form.
/// Throws NotAPolynomial or UnsupportedShape.
Expr factor(const Expr& e);

/// All rational roots of a univariate polynomial in `var`, ascending.
std::vector<mpq_class> rational_roots(const Poly& p, const Expr& var);

/// The n-th cyclotomic polynomial in `var`.
Poly cyclotomic(unsigned n, const Expr& var);

}  // namespace casbridge::cas
