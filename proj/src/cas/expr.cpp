#include "casbridge/cas/expr.hpp"

#include <charconv>
#include <cmath>
#include <functional>

namespace casbridge::cas {

namespace detail {
struct Node {
  Kind kind;
  std::string text;  // Sym name or Str value
  mpz_class integer;
  double real = 0;
  Expr head = Expr(std::shared_ptr<const Node>());
  std::vector<Expr> args;
  std::string head_name;
  std::size_t hash = 0;
  std::size_t depth = 1;
};
}  // namespace detail

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

const Expr& null_sym() {
  static const Expr n = sym("Null");
  return n;
}

}  // namespace

Expr::Expr() : node_(null_sym().node_) {}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_sym(std::string_view n) const { return node_->kind == Kind::Sym && node_->text == n; }
bool Expr::is_app(std::string_view h) const { return node_->kind == Kind::App && node_->head.is_sym(h); }
bool Expr::is_app(std::string_view h, std::size_t n) const { return is_app(h) && node_->args.size() == n; }
const std::string& Expr::name() const { return node_->text; }
const std::string& Expr::str() const { return node_->text; }
const mpz_class& Expr::integer() const { return node_->integer; }
double Expr::real() const { return node_->real; }
const Expr& Expr::head() const { return node_->head; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const std::string& Expr::head_name() const { return node_->head_name; }
std::size_t Expr::hash() const { return node_->hash; }
std::size_t Expr::depth() const { return node_->depth; }

Expr sym(std::string name) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Sym;
  n->hash = mix(1, std::hash<std::string>()(name));
  n->text = std::move(name);
  return Expr(std::move(n));
}

Expr str(std::string value) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Str;
  n->hash = mix(2, std::hash<std::string>()(value));
  n->text = std::move(value);
  return Expr(std::move(n));
}

Expr integer(mpz_class value) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Int;
  n->hash = mix(3, std::hash<std::string>()(value.get_str(16)));
  n->integer = std::move(value);
  return Expr(std::move(n));
}

Expr real(double value) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::Real;
  n->hash = mix(4, std::hash<double>()(value));
  n->real = value;
  return Expr(std::move(n));
}

Expr app(Expr head, std::vector<Expr> args) {
  auto n = std::make_shared<detail::Node>();
  n->kind = Kind::App;
  std::size_t h = mix(5, head.hash());
  std::size_t d = head.depth();
  for (const auto& a : args) {
    h = mix(h, a.hash());
    d = std::max(d, a.depth());
  }
  n->hash = h;
  n->depth = d + 1;
  n->head_name = head.is_sym() ? head.name() : head.head_name();
  n->head = std::move(head);
  n->args = std::move(args);
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return true;
  if (a.kind() != b.kind() || a.hash() != b.hash()) return false;
  switch (a.kind()) {
    case Kind::Sym:
    case Kind::Str: return a.name() == b.name();
    case Kind::Int: return a.integer() == b.integer();
    case Kind::Real: return a.real() == b.real() && std::signbit(a.real()) == std::signbit(b.real());
    case Kind::App: return a.head() == b.head() && a.args() == b.args();
  }
  return false;
}

namespace {

int rank(Kind k) {
  switch (k) {
    case Kind::Int:
    case Kind::Real: return 0;
    case Kind::Str: return 1;
    case Kind::Sym: return 2;
    case Kind::App: return 3;
  }
  return 4;
}

int sgn(int v) { return (v > 0) - (v < 0); }

}  // namespace

int compare(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return 0;
  int ra = rank(a.kind()), rb = rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Kind::Int:
    case Kind::Real: {
      if (a.is_int() && b.is_int()) return sgn(cmp(a.integer(), b.integer()));
      double x = a.is_int() ? a.integer().get_d() : a.real();
      double y = b.is_int() ? b.integer().get_d() : b.real();
      if (x != y) return x < y ? -1 : 1;
      if (a.kind() != b.kind()) return a.is_int() ? -1 : 1;
      if (a.is_real() && std::signbit(x) != std::signbit(y)) return std::signbit(x) ? -1 : 1;
      return 0;
    }
    case Kind::Str:
    case Kind::Sym: return sgn(a.name().compare(b.name()));
    case Kind::App: {
      if (int c = compare(a.head(), b.head())) return c;
      const auto& x = a.args();
      const auto& y = b.args();
      for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (int c = compare(x[i], y[i])) return c;
      }
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

std::string render_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".ein") != std::string::npos) {
    auto e = s.find('e');
    if (e != std::string::npos && s.find('.') == std::string::npos) s.insert(e, ".");
    return s;
  }
  return s + ".";
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

namespace {
void render_to(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::Sym: out += e.name(); return;
    case Kind::Str: out += quote_string(e.str()); return;
    case Kind::Int: out += e.integer().get_str(); return;
    case Kind::Real: out += render_real(e.real()); return;
    case Kind::App: {
      render_to(e.head(), out);
      out += '[';
      bool first = true;
      for (const auto& a : e.args()) {
        if (!first) out += ", ";
        first = false;
        render_to(a, out);
      }
      out += ']';
      return;
    }
  }
}
}  // namespace

std::string render(const Expr& e) {
  std::string out;
  render_to(e, out);
  return out;
}

}  // namespace casbridge::cas
