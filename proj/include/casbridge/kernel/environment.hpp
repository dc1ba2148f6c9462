#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "casbridge/kernel/expr.hpp"

namespace casbridge::kernel {

enum class DeclKind { Axiom, Definition, Theorem, TrustedAxiom };

std::string to_string(DeclKind k);

struct Declaration {
  Name name;
  DeclKind kind = DeclKind::Axiom;
  std::vector<std::string> univ_params;
  Expr type;
  std::optional<Expr> value;
  std::optional<std::string> doc;
  /// Provenance of a TrustedAxiom (the CAS computation that produced it).
  std::optional<std::string> source;

  bool has_value() const { return value.has_value(); }
};

/// Immutable mapping from names to declarations, extended by copy. Sharing an
/// Environment between threads is safe; `add` never mutates the receiver.
class Environment {
 public:
  Environment();

  /// Returns the extended environment. Throws DuplicateName.
  [[nodiscard]] Environment add(Declaration d) const;

  const Declaration* find(const Name& n) const;
  const Declaration& get(const Name& n) const;  // throws UnknownDeclaration
  bool contains(const Name& n) const { return find(n) != nullptr; }
  std::size_t size() const;

  /// Declarations in insertion order.
  std::vector<const Declaration*> declarations() const;
  /// Every TrustedAxiom, in insertion order.
  std::vector<const Declaration*> trusted_axioms() const;

  /// Static type-class table: instance constant for `cls` at carrier `type`.
  std::optional<Name> find_instance(const Name& cls, const Name& type) const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

/// Parse a declaration file (see docs/prelude-format.md).
Environment load_declarations(Environment env, std::istream& in, const std::string& origin = "<input>");
Environment load_declarations_file(Environment env, const std::filesystem::path& path);

/// Path of the shipped prelude file (configured at build time).
std::filesystem::path default_prelude_path();
/// The shipped prelude, loaded once and shared.
const Environment& prelude();

}  // namespace casbridge::kernel
