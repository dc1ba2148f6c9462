#pragma once

#include <vector>

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

/// Canonical forms of the arithmetic heads: nested sums/products are
/// flattened, numbers folded, like terms and like bases collected, and the
/// remaining arguments sorted (numbers first, then by base/exponent lists).
/// The results are fixpoints: canonical_plus of a canonical sum's arguments
/// returns the same sum.
Expr canonical_plus(const std::vector<Expr>& args);
Expr canonical_times(const std::vector<Expr>& args);
Expr canonical_power(const Expr& base, const Expr& exponent);

/// Split a canonical term into its numeric coefficient and the rest
/// (`Times[-2, x]` gives (-2, x); `x` gives (1, x)).
std::pair<Expr, Expr> split_coefficient(const Expr& term);

/// Order used for the arguments of canonical sums.
bool term_less(const Expr& a, const Expr& b);

}  // namespace casbridge::cas
