#pragma once

#include <gmpxx.h>

#include "casbridge/kernel/expr.hpp"

namespace casbridge::kernel {

/// Binary numeral pre-expression: `zero`, `one`, `bit0 t`, `bit1 t`, with the
/// implicit type and instance arguments omitted (the elaborator inserts them).
Expr numeral_encode(const mpz_class& n);

/// Inverse of numeral_encode. Accepts both the pre-expression form and fully
/// elaborated forms (implicit arguments are skipped: only the last argument of
/// `bit0`/`bit1` is inspected). Throws NotANumeral.
mpz_class numeral_decode(const Expr& e);

/// True when `e` is headed by one of the four numeral constants.
bool is_numeral(const Expr& e);

}  // namespace casbridge::kernel
