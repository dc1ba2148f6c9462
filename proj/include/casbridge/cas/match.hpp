#pragma once

#include <map>
#include <optional>
#include <string>

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

using Bindings = std::map<std::string, Expr>;

/// Structural match of `pattern` against `e`. `Blank[]` matches any single
/// expression, `Blank[h]` one whose head is `h` (Integer, Real, String and
/// Symbol name atom kinds); a repeated `Pattern[x, ...]` must bind equal
/// subexpressions. Sequence blanks are not supported.
std::optional<Bindings> match(const Expr& pattern, const Expr& e);
bool match_into(const Expr& pattern, const Expr& e, Bindings& b);

/// Replace symbols bound in `b` throughout `e`.
Expr substitute(const Expr& e, const Bindings& b);

bool is_pattern(const Expr& e);

}  // namespace casbridge::cas
