#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "casbridge/error.hpp"

namespace casbridge::kernel {

/// Hierarchical declaration name. Components are non-empty and never contain
/// `.`, so the dot-joined rendering parses back to the same components.
class Name {
 public:
  Name() = default;
  explicit Name(std::vector<std::string> components);
  Name(const char* dotted);  // NOLINT: implicit for literals
  Name(const std::string& dotted);  // NOLINT

  static Name parse(std::string_view dotted);
  static bool valid_component(std::string_view c);

  const std::vector<std::string>& components() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::string str() const;

  friend bool operator==(const Name&, const Name&) = default;
  friend auto operator<=>(const Name&, const Name&) = default;

 private:
  std::vector<std::string> parts_;
};

struct Level {
  enum class Kind { Lit, Param };
  Kind kind = Kind::Lit;
  std::uint64_t lit = 0;
  std::string param;

  static Level of(std::uint64_t n) { return Level{Kind::Lit, n, {}}; }
  static Level named(std::string p);
  bool is_param() const { return kind == Kind::Param; }
  std::string str() const;

  friend bool operator==(const Level&, const Level&) = default;
};

enum class BinderInfo { Default, Implicit, InstImplicit };

enum class ExprKind {
  Var,
  Sort,
  Const,
  MVar,
  Local,
  App,
  Lam,
  Pi,
  Let,
  // Pre-expression only.
  NatLit,
  Placeholder,
};

namespace detail {
struct ExprNode;
}

/// Immutable CIC-style expression with de Bruijn bound variables. The same
/// type carries pre-expressions, which may additionally contain `NatLit` and
/// `Placeholder` nodes and omit implicit arguments.
class Expr {
 public:
  Expr() = default;

  ExprKind kind() const;
  bool is_null() const { return !node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

  // Var
  std::uint64_t var_index() const;
  // Sort
  const Level& level() const;
  // Const name, MVar name, Local unique name, binder name of Lam/Pi/Let
  const Name& name() const;
  const std::vector<Level>& levels() const;
  // Local
  const Name& pretty_name() const;
  BinderInfo binder_info() const;
  // MVar/Local type, Lam/Pi/Let binder type
  const Expr& type() const;
  // App
  const Expr& fn() const;
  const Expr& arg() const;
  // Lam/Pi/Let
  const Expr& body() const;
  // Let
  const Expr& value() const;
  // NatLit
  const mpz_class& nat_value() const;

  /// One past the largest loose de Bruijn index (0 for closed terms).
  std::uint64_t loose_bvar_range() const;
  bool has_loose_bvars() const { return loose_bvar_range() > 0; }
  bool has_locals() const;
  bool has_mvars() const;
  bool is_pre() const;  // contains NatLit or Placeholder
  std::size_t size() const;

  bool is_app() const { return kind() == ExprKind::App; }
  bool is_const() const { return kind() == ExprKind::Const; }
  bool is_const(const Name& n) const { return is_const() && name() == n; }
  bool is_local() const { return kind() == ExprKind::Local; }
  bool is_binding() const {
    return kind() == ExprKind::Lam || kind() == ExprKind::Pi;
  }

  /// Full structural equality, including binder names and binder info.
  friend bool operator==(const Expr& a, const Expr& b);
  const detail::ExprNode* raw() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::ExprNode> node_;

  friend Expr make_node(detail::ExprNode&&);
};

Expr mk_var(std::uint64_t i);
Expr mk_sort(Level l);
Expr mk_prop();
Expr mk_type();
Expr mk_const(Name n, std::vector<Level> ls = {});
Expr mk_mvar(Name n, Expr type);
Expr mk_local(Name unique, Name pretty, BinderInfo bi, Expr type);
Expr mk_local(Name unique, Expr type);
Expr mk_app(Expr f, Expr a);
Expr mk_app(Expr f, const std::vector<Expr>& args);
Expr mk_lambda(Name binder, BinderInfo bi, Expr type, Expr body);
Expr mk_pi(Name binder, BinderInfo bi, Expr type, Expr body);
Expr mk_arrow(Expr dom, Expr cod);
Expr mk_let(Name binder, Expr type, Expr value, Expr body);
Expr mk_nat(mpz_class n);
Expr mk_placeholder();

/// Head of an application spine and its arguments in order.
const Expr& app_fn(const Expr& e);
std::vector<Expr> app_args(const Expr& e);

/// Equality up to binder names, binder info and constant universe levels.
bool alpha_equal(const Expr& a, const Expr& b);

/// Replace loose `Var(0)` by `replacement`, decrementing other loose indices.
Expr instantiate(const Expr& body, const Expr& replacement);
/// Replace every occurrence of `local` by the de Bruijn index of its depth.
Expr abstract(const Expr& e, const Expr& local);
/// Whether loose `Var(i)` occurs in `e`.
bool has_loose_bvar(const Expr& e, std::uint64_t i);
/// Shift loose indices >= `from` by `amount`.
Expr lift_loose(const Expr& e, std::uint64_t amount, std::uint64_t from = 0);
/// Replace local constants matching `local` by `replacement` (no capture issues
/// since replacement is expected closed w.r.t. bound variables).
Expr replace_local(const Expr& e, const Expr& local, const Expr& replacement);

/// Visit every node once in pre-order. Return false from the callback to
/// stop descending into a node.
template <typename F>
void for_each(const Expr& e, F&& f);

/// Session-unique fresh name of the form `_uniq.N`.
Name fresh_unique_name();

std::string to_string(BinderInfo bi);
BinderInfo binder_info_from_string(std::string_view s);

}  // namespace casbridge::kernel

#include "casbridge/kernel/expr_impl.hpp"
