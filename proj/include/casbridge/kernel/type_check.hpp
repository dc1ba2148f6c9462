#pragma once

#include "casbridge/kernel/environment.hpp"

namespace casbridge::kernel {

/// Minimal checker for the prelude fragment: beta, delta (definitions are
/// unfolded on demand) and zeta reduction; no inductive types.
class TypeChecker {
 public:
  explicit TypeChecker(const Environment& env) : env_(env) {}

  /// Infers the type of a closed expression. Throws TypeError.
  Expr infer(const Expr& e);
  void check(const Expr& e, const Expr& expected);

  Expr whnf(const Expr& e);
  bool is_def_eq(const Expr& a, const Expr& b);
  /// True when `e` is a proof, i.e. its type lives in Prop.
  bool is_proof(const Expr& e);

  const Environment& env() const { return env_; }

 private:
  Expr ensure_sort(const Expr& t, const Expr& ctx);
  Expr ensure_pi(const Expr& t, const Expr& ctx);
  bool def_eq_core(const Expr& a, const Expr& b, int depth);

  const Environment& env_;
};

Expr type_check(const Environment& env, const Expr& e);

/// Delta-unfold the named definitions everywhere in `e`, beta-reducing the
/// redexes this creates.
Expr unfold_definitions(const Environment& env, const Expr& e, const std::vector<Name>& names);

/// Beta-reduce head redexes throughout `e`.
Expr beta_normalize(const Expr& e);

}  // namespace casbridge::kernel
