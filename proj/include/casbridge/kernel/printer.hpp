#pragma once

#include <string>

#include "casbridge/kernel/expr.hpp"

namespace casbridge::kernel {

class Environment;

/// Application syntax with every argument shown, e.g.
/// `pow_nat (add (neg one) x) (bit0 one)`. NatLit nodes print in their binary
/// numeral form, locals by pretty name, universe levels are omitted.
std::string print_raw(const Expr& e);

/// Standard notation with implicit and instance arguments hidden and numerals
/// in decimal, e.g. `(x + -1)^2`.
std::string pretty(const Environment& env, const Expr& e);

}  // namespace casbridge::kernel
