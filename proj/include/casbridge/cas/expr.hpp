#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace casbridge::cas {

enum class Kind { Sym, Str, Int, Real, App };

namespace detail {
struct Node;
}

/// Immutable Wolfram-style expression: symbols, strings, big integers,
/// doubles and applications `head[args...]`. Cheap to copy.
class Expr {
 public:
  Expr();  // the symbol Null

  Kind kind() const;
  bool is_sym() const { return kind() == Kind::Sym; }
  bool is_str() const { return kind() == Kind::Str; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_real() const { return kind() == Kind::Real; }
  bool is_app() const { return kind() == Kind::App; }

  bool is_sym(std::string_view name) const;
  /// Application whose head is the symbol `head`.
  bool is_app(std::string_view head) const;
  bool is_app(std::string_view head, std::size_t arity) const;

  const std::string& name() const;  // Sym
  const std::string& str() const;   // Str
  const mpz_class& integer() const;  // Int
  double real() const;               // Real
  const Expr& head() const;          // App
  const std::vector<Expr>& args() const;
  const Expr& arg(std::size_t i) const { return args().at(i); }
  std::size_t arity() const { return args().size(); }

  /// Name of the innermost head symbol (`f` for `f[a][b]`), or "" if none.
  const std::string& head_name() const;
  std::size_t hash() const;
  std::size_t depth() const;

  const detail::Node* raw() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  friend Expr sym(std::string);
  friend Expr str(std::string);
  friend Expr integer(mpz_class);
  friend Expr real(double);
  friend Expr app(Expr, std::vector<Expr>);
  friend struct detail::Node;
  std::shared_ptr<const detail::Node> node_;
};

Expr sym(std::string name);
Expr str(std::string value);
Expr integer(mpz_class value);
inline Expr integer(long v) { return integer(mpz_class(v)); }
Expr real(double value);
Expr app(Expr head, std::vector<Expr> args);
inline Expr app(std::string_view head, std::vector<Expr> args) { return app(sym(std::string(head)), std::move(args)); }
inline Expr list(std::vector<Expr> items) { return app("List", std::move(items)); }

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

/// Total order: numbers by value, then strings, symbols, applications
/// (head, then arguments lexicographically, then arity).
int compare(const Expr& a, const Expr& b);
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

/// Full form: `Head[a, b]`, strings quoted, reals in shortest round-trip
/// notation with a mandatory `.` (so `1.` is a real and `1` an integer).
std::string render(const Expr& e);
std::string render_real(double v);
std::string quote_string(std::string_view s);

}  // namespace casbridge::cas
