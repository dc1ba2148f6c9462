#include "casbridge/cas/poly.hpp"

#include <set>

#include "casbridge/cas/canonical.hpp"
#include "casbridge/cas/number.hpp"
#include "casbridge/error.hpp"

namespace casbridge::cas {

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (int c = compare(a[i].first, b[i].first)) return c < 0;
    if (a[i].second != b[i].second) return a[i].second < b[i].second;
  }
  return a.size() < b.size();
}

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && compare(a[i].first, b[j].first) < 0)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || compare(b[j].first, a[i].first) < 0) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

constexpr unsigned long kMaxExponent = 10000;

}  // namespace

Poly Poly::constant(const mpq_class& c) {
  Poly p;
  p.add_term({}, c);
  return p;
}

Poly Poly::variable(const Expr& v) {
  Poly p;
  p.add_term({{v, 1}}, 1);
  return p;
}

void Poly::add_term(const Monomial& m, const mpq_class& c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c).first->second.canonicalize();
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::from_expr(const Expr& e) {
  if (auto q = as_rational(e)) return constant(*q);
  if (e.is_real()) throw NotAPolynomial("inexact number " + render(e));
  if (e.is_app("Plus")) {
    Poly p;
    for (const auto& a : e.args()) p = p + from_expr(a);
    return p;
  }
  if (e.is_app("Times")) {
    Poly p = constant(1);
    for (const auto& a : e.args()) p = p * from_expr(a);
    return p;
  }
  if (e.is_app("Power", 2)) {
    Poly b = from_expr(e.arg(0));
    const Expr& x = e.arg(1);
    if (x.is_int() && x.integer() >= 0) {
      if (x.integer() > kMaxExponent) throw NotAPolynomial("exponent too large in " + render(e));
      return b.pow(x.integer().get_ui());
    }
    if (x.is_int() && b.is_constant() && b.constant_term() != 0 && -x.integer() <= kMaxExponent) {
      mpq_class inv = 1 / b.constant_term();
      return Poly::constant(inv).pow(mpz_class(-x.integer()).get_ui());
    }
    throw NotAPolynomial("non-polynomial power " + render(e));
  }
  if (e.is_app("Rational") || e.is_app("Failure")) throw NotAPolynomial(render(e));
  return variable(e);
}

Expr Poly::to_expr() const {
  std::vector<Expr> terms;
  for (const auto& [m, c] : terms_) {
    std::vector<Expr> fs{from_rational(c)};
    for (const auto& [v, k] : m) fs.push_back(k == 1 ? v : app("Power", {v, integer(static_cast<long>(k))}));
    terms.push_back(canonical_times(fs));
  }
  return canonical_plus(terms);
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

mpq_class Poly::constant_term() const { return coefficient({}); }

mpq_class Poly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

std::vector<Expr> Poly::variables() const {
  std::set<Expr, ExprLess> vs;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, k] : m) vs.insert(v);
  }
  return {vs.begin(), vs.end()};
}

unsigned long Poly::total_degree() const {
  unsigned long d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned long s = 0;
    for (const auto& [v, k] : m) s += k;
    d = std::max(d, s);
  }
  return d;
}

unsigned long Poly::degree(const Expr& var) const {
  unsigned long d = 0;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, k] : m) {
      if (v == var) d = std::max(d, k);
    }
  }
  return d;
}

bool Poly::is_homogeneous() const {
  std::optional<unsigned long> deg;
  for (const auto& [m, c] : terms_) {
    unsigned long s = 0;
    for (const auto& [v, k] : m) s += k;
    if (deg && *deg != s) return false;
    deg = s;
  }
  return true;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const { return scaled(-1); }

Poly Poly::scaled(const mpq_class& c) const {
  Poly r;
  if (c == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : o.terms_) r.add_term(mono_mul(m1, m2), c1 * c2);
  }
  return r;
}

Poly Poly::pow(unsigned long n) const {
  Poly result = constant(1);
  Poly base = *this;
  while (n) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Poly Poly::substitute(const Expr& var, const Poly& value) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    Poly term;
    Monomial rest;
    unsigned long k = 0;
    for (const auto& [v, e] : m) {
      if (v == var) {
        k = e;
      } else {
        rest.emplace_back(v, e);
      }
    }
    term.add_term(rest, c);
    out = out + (k ? term * value.pow(k) : term);
  }
  return out;
}

}  // namespace casbridge::cas
