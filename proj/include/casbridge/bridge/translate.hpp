#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casbridge/cas/engine.hpp"
#include "casbridge/cas/expr.hpp"
#include "casbridge/kernel/environment.hpp"
#include "casbridge/kernel/expr.hpp"

namespace casbridge::bridge {

/// CAS symbol name to kernel placeholder local. Extended by copy.
using TransEnv = std::map<std::string, kernel::Expr>;

class RuleRegistry;

using KeyedTranslator =
    std::function<kernel::Expr(const RuleRegistry&, const TransEnv&, const std::vector<cas::Expr>& args)>;
using UnkeyedTranslator = std::function<kernel::Expr(const RuleRegistry&, const TransEnv&, const cas::Expr& head,
                                                     const std::vector<cas::Expr>& args)>;

struct SymRule {
  std::string cas_symbol;
  kernel::Expr target;
};

struct KeyedAppRule {
  std::string key;
  KeyedTranslator translate;
};

struct UnkeyedAppRule {
  std::string label;
  UnkeyedTranslator translate;
};

/// Back-translation rules. Immutable; `with` returns an extended copy and
/// later rules are tried after earlier ones of the same class.
class RuleRegistry {
 public:
  explicit RuleRegistry(kernel::Environment env = kernel::prelude());

  [[nodiscard]] RuleRegistry with(SymRule r) const;
  [[nodiscard]] RuleRegistry with(KeyedAppRule r) const;
  [[nodiscard]] RuleRegistry with(UnkeyedAppRule r) const;

  const std::vector<SymRule>& sym_rules() const { return sym_; }
  std::vector<const KeyedAppRule*> keyed(const std::string& key) const;
  const std::vector<UnkeyedAppRule>& unkeyed() const { return unkeyed_; }
  const kernel::Environment& env() const { return env_; }

 private:
  kernel::Environment env_;
  std::vector<SymRule> sym_;
  std::vector<KeyedAppRule> keyed_;
  std::vector<UnkeyedAppRule> unkeyed_;
};

inline RuleRegistry register_sym_rule(const RuleRegistry& reg, SymRule r) { return reg.with(std::move(r)); }
inline RuleRegistry register_keyed_rule(const RuleRegistry& reg, KeyedAppRule r) { return reg.with(std::move(r)); }
inline RuleRegistry register_unkeyed_rule(const RuleRegistry& reg, UnkeyedAppRule r) { return reg.with(std::move(r)); }

/// `Symbol = kernel.name` lines, `#` comments. Throws SyntaxError.
RuleRegistry load_sym_rules_text(const RuleRegistry& reg, const std::string& text);
RuleRegistry load_sym_rules(const RuleRegistry& reg, const std::filesystem::path& path);

/// Arithmetic, relations, logic, binders, Lean* reflections, application
/// folding and Hold splicing, plus the symbols in data/bridge_rules.txt.
const RuleRegistry& prelude_registry();
/// The same rules over another environment.
RuleRegistry make_prelude_registry(const kernel::Environment& env);

/// Translate a CAS expression to a pre-expression. Throws NoApplicableRule.
kernel::Expr pexpr_of_mmexpr(const RuleRegistry& reg, const TransEnv& env, const cas::Expr& e);

struct OpenTerm {
  kernel::Expr term;
  /// One local per free symbol, in first-occurrence order.
  std::vector<kernel::Expr> locals;
  std::vector<std::string> names;
};

/// Translate `e` with every symbol that has no sym rule (outside head
/// position) bound to a fresh local of `free_type`, then elaborate.
OpenTerm elaborate_open(const RuleRegistry& reg, const cas::Expr& e, const kernel::Expr& free_type,
                        const std::optional<kernel::Expr>& expected = std::nullopt);

/// Evaluate `LeanForm[e, env]` in `ctx`. Throws BinderDepthError or
/// EvalError for other failures.
cas::Expr lean_form(cas::Context& ctx, const cas::Expr& e, const std::vector<cas::Expr>& env = {});

}  // namespace casbridge::bridge
