#include "casbridge/cas/number.hpp"

namespace casbridge::cas {

Number operator+(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number::of(mpq_class(a.q + b.q));
  return Number::of(a.to_double() + b.to_double());
}

Number operator*(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number::of(mpq_class(a.q * b.q));
  return Number::of(a.to_double() * b.to_double());
}

int compare_values(const Number& a, const Number& b) {
  if (a.exact && b.exact) {
    int c = cmp(a.q, b.q);
    return (c > 0) - (c < 0);
  }
  double x = a.to_double(), y = b.to_double();
  return (x > y) - (x < y);
}

bool is_numeric(const Expr& e) {
  if (e.is_int() || e.is_real()) return true;
  return e.is_app("Rational", 2) && e.arg(0).is_int() && e.arg(1).is_int() && e.arg(1).integer() != 0;
}

std::optional<mpq_class> as_rational(const Expr& e) {
  if (e.is_int()) return mpq_class(e.integer());
  if (e.is_app("Rational", 2) && e.arg(0).is_int() && e.arg(1).is_int() && e.arg(1).integer() != 0) {
    mpq_class q(e.arg(0).integer(), e.arg(1).integer());
    q.canonicalize();
    return q;
  }
  return std::nullopt;
}

std::optional<Number> as_number(const Expr& e) {
  if (e.is_real()) return Number::of(e.real());
  if (auto q = as_rational(e)) return Number::of(*q);
  return std::nullopt;
}

Expr from_rational(const mpq_class& q) {
  if (q.get_den() == 1) return integer(q.get_num());
  return app("Rational", {integer(q.get_num()), integer(q.get_den())});
}

Expr from_number(const Number& n) { return n.exact ? from_rational(n.q) : real(n.d); }

}  // namespace casbridge::cas
