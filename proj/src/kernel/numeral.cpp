#include "casbridge/kernel/numeral.hpp"

namespace casbridge::kernel {

Expr numeral_encode(const mpz_class& n) {
  if (n < 0) throw NotANumeral("negative value " + n.get_str());
  if (n == 0) return mk_const("zero");
  if (n == 1) return mk_const("one");
  mpz_class half = n / 2;
  const char* head = (n % 2 == 0) ? "bit0" : "bit1";
  return mk_app(mk_const(head), numeral_encode(half));
}

bool is_numeral(const Expr& e) {
  const Expr& h = app_fn(e);
  if (!h.is_const()) return false;
  const auto& s = h.name();
  return s == Name("zero") || s == Name("one") || s == Name("bit0") || s == Name("bit1");
}

mpz_class numeral_decode(const Expr& e) {
  const Expr& h = app_fn(e);
  if (e.kind() == ExprKind::NatLit) return e.nat_value();
  if (!h.is_const()) throw NotANumeral("head is not a constant");
  const Name& n = h.name();
  if (n == Name("zero")) return 0;
  if (n == Name("one")) return 1;
  bool b0 = n == Name("bit0");
  bool b1 = n == Name("bit1");
  if (!b0 && !b1) throw NotANumeral("unexpected head '" + n.str() + "'");
  if (!e.is_app()) throw NotANumeral("'" + n.str() + "' without argument");
  mpz_class inner = numeral_decode(e.arg());
  return b0 ? mpz_class(2 * inner) : mpz_class(2 * inner + 1);
}

}  // namespace casbridge::kernel
