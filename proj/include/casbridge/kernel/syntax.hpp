#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "casbridge/kernel/expr.hpp"

namespace casbridge::kernel {

class Environment;

/// Minimal s-expression tree used by the declaration file format.
struct SExpr {
  enum class Kind { Atom, String, List };
  Kind kind = Kind::Atom;
  std::string text;
  char open = '(';  // '(', '{' or '[' for lists
  std::vector<SExpr> items;

  bool is_atom(std::string_view s) const { return kind == Kind::Atom && text == s; }
};

/// Read every top-level s-expression in `src`. `#` starts a line comment.
std::vector<SExpr> read_sexprs(std::string_view src);

/// Convert a parenthesized term to an expression. Identifiers resolve to
/// enclosing binders first, then to constants. Integer atoms become NatLit,
/// `_` becomes Placeholder.
Expr expr_of_sexpr(const SExpr& s);

/// Surface (infix) syntax for kernel terms, used by antiquotations and the CLI:
///   arithmetic `+ - * / ^`, unary `-`, numerals, comparisons
///   `= != ≠ < <= ≤ > >= ≥`, logic `∧ /\ ∨ \/ ¬ ~ → -> ↔ <->`, `false`,
///   `true`, application by juxtaposition, `fun x, body` / `λ x, body`.
/// Identifiers that name declarations in `env` become constants; any other
/// identifier becomes a free local whose type comes from `var_types`, or
/// `default_type` when absent. The same identifier always maps to the same
/// local within one parse, and across parses when `locals` is reused.
/// Binders without a type annotation also get `default_type` when it is set.
struct SurfaceContext {
  const Environment* env = nullptr;
  std::map<std::string, Expr> var_types;
  Expr default_type;
  /// Locals created so far, by identifier. Updated by parse_surface.
  std::map<std::string, Expr> locals;
};

Expr parse_surface(std::string_view src, SurfaceContext& ctx);

}  // namespace casbridge::kernel
