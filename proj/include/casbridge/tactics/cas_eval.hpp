#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "casbridge/bridge/translate.hpp"
#include "casbridge/cas/engine.hpp"
#include "casbridge/kernel/expr.hpp"

namespace casbridge::tactics {

/// Evaluates one CAS command in a fresh context and returns the result.
/// Failures come back as Failure[...] expressions, not exceptions.
using CasEval = std::function<cas::Expr(const std::string& source)>;

/// In-process evaluator over `global` (fresh local context per call).
CasEval local_cas(std::shared_ptr<cas::GlobalContext> global = cas::make_default_global());

/// Throw RemoteError if `r` is a Failure; else return it.
const cas::Expr& expect_success(const cas::Expr& r);

/// Substitute the rendered reflection of `e` for the single `%` in
/// `templ`, prefix the rules in `aux_rules` (one per line) so they are
/// defined in the request's context, evaluate, and translate the result.
/// Throws StageError naming the failing stage.
kernel::Expr run_command_using(const CasEval& eval, const std::string& templ, const kernel::Expr& e,
                               const std::optional<std::string>& aux_rules = std::nullopt,
                               const bridge::RuleRegistry& reg = bridge::prelude_registry());

/// The command text `run_command_using` sends. Throws StageError when the
/// template does not contain exactly one `%`.
std::string instantiate_template(const std::string& templ, const kernel::Expr& e,
                                 const std::optional<std::string>& aux_rules = std::nullopt);

}  // namespace casbridge::tactics
