#pragma once

#include <string_view>

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

/// Parse CAS surface syntax (full form plus infix sugar). The grammar is
/// documented in docs/cas-syntax.md. Throws ParseError("column N: ...").
Expr parse(std::string_view src);

}  // namespace casbridge::cas
