#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "casbridge/cas/expr.hpp"
#include "casbridge/kernel/environment.hpp"
#include "casbridge/tactics/cas_eval.hpp"

namespace casbridge::prover {

/// Propositional formula. Not and Iff are kept for display and encoding and
/// desugared before search.
class PropFormula {
 public:
  enum class Kind { Atom, And, Or, Implies, False, Not, Iff };

  static PropFormula atom(std::string name);
  static PropFormula falsum();
  static PropFormula conj(PropFormula l, PropFormula r);
  static PropFormula disj(PropFormula l, PropFormula r);
  static PropFormula implies(PropFormula l, PropFormula r);
  static PropFormula neg(PropFormula p);
  static PropFormula iff(PropFormula l, PropFormula r);

  Kind kind() const;
  const std::string& name() const;  // Atom
  const PropFormula& lhs() const;   // binary kinds, and the operand of Not
  const PropFormula& rhs() const;
  /// Number of connectives and atoms.
  std::size_t size() const;

  friend bool operator==(const PropFormula& a, const PropFormula& b);

  struct Node;

 private:
  static PropFormula wrap(std::shared_ptr<const Node> n);
  explicit PropFormula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

std::string to_string(const PropFormula& f);

/// Atom names to kernel propositions. Atoms missing from the table get a
/// fresh local of type Prop on first use.
class AtomTable {
 public:
  kernel::Expr get(const std::string& name);
  std::optional<std::string> name_of(const kernel::Expr& e) const;
  std::string add(const kernel::Expr& e, const std::string& preferred);
  /// Every atom, in first-use order.
  const std::vector<std::pair<std::string, kernel::Expr>>& atoms() const { return order_; }

 private:
  std::map<std::string, kernel::Expr> by_name_;
  std::vector<std::pair<std::string, kernel::Expr>> order_;
};

kernel::Expr encode(const PropFormula& f, AtomTable& atoms);

/// Reads and/or/not/iff/false/arrows; any other proposition becomes an atom.
/// Throws TranslationFailed when `e` is not a proposition former.
PropFormula prop_of_kernel(const kernel::Environment& env, const kernel::Expr& e, AtomTable& atoms);

/// G4ip search. The proof term checks against `encode(f, atoms)`.
std::optional<kernel::Expr> intuit(const PropFormula& f, AtomTable& atoms);

/// The proof in the CAS proof calculus (LeanProof on the reflected term).
/// Throws UnsupportedProofConstant.
cas::Expr to_cas_calculus(const kernel::Expr& proof, const tactics::CasEval& eval = tactics::local_cas());

struct ExplodeStep {
  std::size_t index = 0;
  std::size_t depth = 0;
  /// "assumption", "→I", "∀I", "→E", a constant name, a hypothesis name,
  /// or "let"/"mvar" for opaque nodes.
  std::string rule;
  std::vector<std::size_t> args;
  kernel::Expr goal;
  /// Hypothesis name, for assumption steps.
  std::string hyp;
  /// The local introduced by an assumption step; later goals mention it.
  kernel::Expr local;
};

/// Fitch-style rows of a proof, post-order; the variable introduced by a
/// binder gets its step before the body. Throws IllTypedProof.
std::vector<ExplodeStep> explode(const kernel::Environment& env, const kernel::Expr& proof);

/// Rebuild a term from explode rows. The result's type is the last row's
/// goal when the rows are faithful. Throws IllTypedProof.
kernel::Expr replay_explode(const kernel::Environment& env, const std::vector<ExplodeStep>& steps);

std::string render_explode(const kernel::Environment& env, const std::vector<ExplodeStep>& steps);

struct DeclInfo {
  std::string name;
  std::string kind;
  std::string type;
  cas::Expr type_expr;
  std::optional<std::string> doc;
};

DeclInfo get_decl_info(const kernel::Environment& env, const kernel::Name& name);

struct ProveResult {
  std::string status;
  /// Statement that was proved, closed over its atoms.
  kernel::Expr statement;
  cas::Expr proof;
  std::vector<ExplodeStep> explode;
};

/// Back-translate `f`, elaborate at Prop and run `tactic` (intuit, norm_num,
/// linarith or ring). Free symbols become Prop atoms for intuit and real
/// variables otherwise. Throws TranslationFailed or TacticFailed.
ProveResult prove_for_cas(const kernel::Environment& env, const cas::Expr& f, const std::string& tactic,
                          const tactics::CasEval& eval = tactics::local_cas());

}  // namespace casbridge::prover
