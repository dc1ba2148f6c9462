#pragma once

#include <vector>

#include "casbridge/cas/poly.hpp"

namespace casbridge::cas {

/// All solutions of `eqs = 0` over `vars`, each a value per variable in the
/// order of `vars`, sorted. Handles systems that reduce, by eliminating
/// variables with constant linear coefficients and by rational roots of
/// univariate equations, to finitely many rational points. Anything else
/// throws UnsupportedSystem.
std::vector<std::vector<mpq_class>> solve_polys(const std::vector<Poly>& eqs, const std::vector<Expr>& vars);

}  // namespace casbridge::cas
