#pragma once

#include "casbridge/cas/expr.hpp"
#include "casbridge/kernel/expr.hpp"

namespace casbridge::bridge {

/// Constructor-for-constructor encoding of a kernel expression:
///   Var i            LeanVar[i]
///   Sort l           LeanSort[l]               (level: integer or LeanLevelParam["u"])
///   Const n ls       LeanConst["n", {ls...}]
///   MVar             LeanMVar["name", type]
///   Local            LeanLocal["unique", "pretty", "binfo", type]
///   App f a          LeanApp[f, a]
///   Lam/Pi           LeanLambda/LeanPi["name", "binfo", type, body]
///   Let              LeanLet["name", type, value, body]
///   NatLit n         LeanNatLit[n]             (pre-expressions only)
///   Placeholder      LeanPlaceholder[]
/// Names are dot-joined; binder info is "default", "implicit" or "inst".
cas::Expr reflect(const kernel::Expr& e);

/// Exact inverse of reflect. Throws MalformedReflection naming the offending
/// subtree.
kernel::Expr decode_reflection(const cas::Expr& e);

/// True when `e` is an application of one of the Lean* reflection heads.
bool is_reflection_head(const cas::Expr& e);

}  // namespace casbridge::bridge
