#pragma once

#include <optional>

#include "casbridge/kernel/environment.hpp"

namespace casbridge::kernel {

struct ElabOptions {
  /// Carrier type given to numerals whose type is not forced by context.
  Name default_numeral_type = Name("real");
};

/// Turn a pre-expression into a fully explicit kernel expression: implicit and
/// instance arguments of constants are inserted, placeholders are solved by
/// first-order unification, instances come from the environment's static
/// class table and numerals are expanded to `zero/one/bit0/bit1` at their
/// carrier type. The result is re-checked by the type checker.
/// Throws ElaborationFailure or TypeMismatch.
Expr elaborate(const Environment& env, const Expr& pre, const std::optional<Expr>& expected = std::nullopt,
               const ElabOptions& opts = {});

/// Elaborate and also return the inferred type.
std::pair<Expr, Expr> elaborate_with_type(const Environment& env, const Expr& pre,
                                          const std::optional<Expr>& expected = std::nullopt,
                                          const ElabOptions& opts = {});

/// Drop the implicit and instance arguments of constant applications and the
/// universe levels of constants: the pre-expression that elaborates back to
/// `e` when `e` is well typed.
Expr erase_to_pre(const Environment& env, const Expr& e);

}  // namespace casbridge::kernel
