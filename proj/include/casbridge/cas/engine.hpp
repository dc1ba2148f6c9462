#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "casbridge/cas/expr.hpp"

namespace casbridge::cas {

struct RewriteRule {
  Expr lhs;
  Expr rhs;
  bool delayed = false;
};

/// Rules keyed by the innermost head name of their left-hand side (or the
/// symbol name for own-values), in definition order.
class RuleStore {
 public:
  /// Adds a rule; a rule with an identical left-hand side is replaced.
  void add(RewriteRule r);
  const std::vector<RewriteRule>* find(const std::string& key) const;
  std::size_t size() const;
  bool empty() const { return rules_.empty(); }

 private:
  std::unordered_map<std::string, std::vector<RewriteRule>> rules_;
};

/// The persistent context shared by every evaluation. Readers take cheap
/// snapshots; writers copy the store and swap it in.
class GlobalContext {
 public:
  GlobalContext();
  std::shared_ptr<const RuleStore> snapshot() const;
  void add(RewriteRule r);
  void clear();

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const RuleStore> store_;
};

inline constexpr std::size_t kDefaultStepBudget = 100000;

/// One evaluation context: local rules layered over the global context.
/// Definitions go to the local store unless the context targets the global
/// one. Not thread safe; use one per thread.
class Context {
 public:
  enum class Scope { Local, Global };

  explicit Context(std::shared_ptr<GlobalContext> global = std::make_shared<GlobalContext>(),
                   Scope scope = Scope::Local);

  /// Evaluate to a fixpoint. Resets the step counter and the fresh-symbol
  /// counter. Throws StepBudgetExceeded.
  Expr evaluate(const Expr& e);
  /// Evaluate from inside a builtin, sharing the running budget.
  Expr evaluate_nested(const Expr& e);

  void define(RewriteRule r);
  /// Removes every local rule.
  void clear();
  const RuleStore& local_rules() const { return local_; }
  const std::shared_ptr<GlobalContext>& global() const { return global_; }

  std::size_t step_budget = kDefaultStepBudget;
  std::size_t steps() const { return steps_; }
  /// `prefix` followed by a counter that restarts with every evaluate call.
  Expr fresh_symbol(const std::string& prefix);

 private:
  Expr eval(const Expr& e);
  Expr eval_once(const Expr& e);
  std::optional<Expr> apply_rules(const RuleStore& store, const std::string& key, const Expr& e);
  void count_step();

  std::shared_ptr<GlobalContext> global_;
  Scope scope_;
  RuleStore local_;
  std::size_t steps_ = 0;
  std::size_t depth_ = 0;
  std::size_t fresh_ = 0;
};

/// Strip every `Inactive[h]` wrapper.
Expr strip_inactive(const Expr& e);

Expr failure(const std::string& kind, const std::string& message);
bool is_failure(const Expr& e);

/// Evaluate each line (`lhs := rhs`, blank lines and whole-line `(* *)`
/// comments skipped) of a rule file into `ctx`. Throws ParseError with the
/// line number.
void load_rule_file(Context& ctx, const std::filesystem::path& path);
void load_rule_text(Context& ctx, const std::string& text, const std::string& origin = "<text>");

/// Files shipped in the data directory (overridable with $CASBRIDGE_DATA).
std::filesystem::path data_path(const std::string& file);

/// A global context with data/leanform.m loaded.
std::shared_ptr<GlobalContext> make_default_global();

using Builtin = std::function<std::optional<Expr>(Context&, const Expr&)>;

/// Builtins by head symbol name. A builtin returns nullopt when it does not
/// apply.
const std::unordered_map<std::string, Builtin>& builtins();

}  // namespace casbridge::cas
