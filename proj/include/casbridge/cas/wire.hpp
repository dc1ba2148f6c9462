#pragma once

#include "json.hpp"

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

/// JSON object tagged by constructor; integers travel as decimal strings.
nlohmann::json to_wire(const Expr& e);
/// Throws WireError on malformed input.
Expr from_wire(const nlohmann::json& j);

}  // namespace casbridge::cas
