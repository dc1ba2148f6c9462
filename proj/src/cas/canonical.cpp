#include "casbridge/cas/canonical.hpp"

#include <cmath>
#include <map>

#include "casbridge/cas/number.hpp"

namespace casbridge::cas {

namespace {

const Expr& one() {
  static const Expr e = integer(1);
  return e;
}

std::pair<Expr, Expr> base_exponent(const Expr& f) {
  if (f.is_app("Power", 2)) return {f.arg(0), f.arg(1)};
  return {f, one()};
}

std::vector<std::pair<Expr, Expr>> factor_key(const Expr& rest) {
  std::vector<std::pair<Expr, Expr>> out;
  if (rest.is_app("Times")) {
    for (const auto& f : rest.args()) out.push_back(base_exponent(f));
  } else {
    out.push_back(base_exponent(rest));
  }
  return out;
}

int compare_exponent(const Expr& a, const Expr& b) {
  auto x = as_number(a), y = as_number(b);
  if (x && y) return compare_values(*x, *y);
  return compare(a, b);
}

int compare_keys(const std::vector<std::pair<Expr, Expr>>& a, const std::vector<std::pair<Expr, Expr>>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (int c = compare(a[i].first, b[i].first)) return c;
    if (int c = compare_exponent(a[i].second, b[i].second)) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

bool factor_less(const Expr& a, const Expr& b) {
  auto [ba, ea] = base_exponent(a);
  auto [bb, eb] = base_exponent(b);
  if (int c = compare(ba, bb)) return c < 0;
  return compare_exponent(ea, eb) < 0;
}

std::optional<mpz_class> exact_root(const mpz_class& v, unsigned long n) {
  if (v < 0) return std::nullopt;
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), v.get_mpz_t(), n) == 0) return std::nullopt;
  return r;
}

constexpr unsigned long kMaxExactExponent = 100000;

std::optional<Expr> numeric_power(const Number& b, const Expr& exponent) {
  if (!b.exact) {
    auto e = as_number(exponent);
    if (!e) return std::nullopt;
    double r = std::pow(b.d, e->to_double());
    if (std::isnan(r)) return std::nullopt;
    return real(r);
  }
  if (exponent.is_real()) {
    if (b.q < 0) return std::nullopt;
    return real(std::pow(b.q.get_d(), exponent.real()));
  }
  auto eq = as_rational(exponent);
  if (!eq) return std::nullopt;
  if (b.q == 0) {
    if (*eq > 0) return integer(0);
    return app("Failure", {str("DivisionByZero"), str("0 raised to a non-positive power")});
  }
  if (b.q == 1) return one();
  const mpz_class& num = eq->get_num();
  const mpz_class& den = eq->get_den();
  if (!num.fits_slong_p() || abs(num) > kMaxExactExponent || !den.fits_ulong_p()) return std::nullopt;
  mpq_class base = b.q;
  if (den != 1) {
    auto rn = exact_root(base.get_num(), den.get_ui());
    auto rd = exact_root(base.get_den(), den.get_ui());
    if (!rn || !rd) return std::nullopt;
    base = mpq_class(*rn, *rd);
  }
  long n = num.get_si();
  mpz_class p, q;
  mpz_pow_ui(p.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(std::labs(n)));
  mpz_pow_ui(q.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(std::labs(n)));
  mpq_class r = n >= 0 ? mpq_class(p, q) : mpq_class(q, p);
  r.canonicalize();
  return from_rational(r);
}

void flatten_into(const Expr& e, std::string_view head, std::vector<Expr>& out) {
  if (e.is_app(head)) {
    for (const auto& a : e.args()) flatten_into(a, head, out);
  } else {
    out.push_back(e);
  }
}

}  // namespace

std::pair<Expr, Expr> split_coefficient(const Expr& term) {
  if (term.is_app("Times") && term.arity() >= 2 && is_numeric(term.arg(0))) {
    if (term.arity() == 2) return {term.arg(0), term.arg(1)};
    return {term.arg(0), app("Times", std::vector<Expr>(term.args().begin() + 1, term.args().end()))};
  }
  return {one(), term};
}

bool term_less(const Expr& a, const Expr& b) {
  bool na = is_numeric(a), nb = is_numeric(b);
  if (na != nb) return na;
  if (na) return compare_values(*as_number(a), *as_number(b)) < 0;
  auto [ca, ra] = split_coefficient(a);
  auto [cb, rb] = split_coefficient(b);
  if (int c = compare_keys(factor_key(ra), factor_key(rb))) return c < 0;
  if (int c = compare(ra, rb)) return c < 0;
  return compare_values(*as_number(ca), *as_number(cb)) < 0;
}

Expr canonical_plus(const std::vector<Expr>& input) {
  std::vector<Expr> flat;
  for (const auto& a : input) flatten_into(a, "Plus", flat);
  Number constant = Number::of(mpq_class(0));
  bool any_number = false;
  std::map<Expr, Number, ExprLess> coeffs;
  std::vector<Expr> order;
  for (const auto& t : flat) {
    if (auto n = as_number(t)) {
      constant = constant + *n;
      any_number = true;
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    auto it = coeffs.find(rest);
    if (it == coeffs.end()) {
      coeffs.emplace(rest, *as_number(c));
      order.push_back(rest);
    } else {
      it->second = it->second + *as_number(c);
    }
  }
  std::vector<Expr> terms;
  bool inexact_zero_dropped = false;
  for (const auto& rest : order) {
    const Number& c = coeffs.at(rest);
    if (c.is_zero()) {
      if (!c.exact) inexact_zero_dropped = true;
      continue;
    }
    terms.push_back(c.is_one() ? rest : canonical_times({from_number(c), rest}));
  }
  std::sort(terms.begin(), terms.end(), term_less);
  if (inexact_zero_dropped && constant.exact) constant = Number::of(constant.q.get_d());
  bool keep_constant = !constant.is_zero() || (!constant.exact && any_number) || terms.empty();
  if (keep_constant) terms.insert(terms.begin(), from_number(constant));
  if (terms.size() == 1) return terms[0];
  return app("Plus", std::move(terms));
}

Expr canonical_times(const std::vector<Expr>& input) {
  std::vector<Expr> flat;
  for (const auto& a : input) flatten_into(a, "Times", flat);
  Number coeff = Number::of(mpq_class(1));
  std::map<Expr, Expr, ExprLess> exps;
  std::vector<Expr> order;
  for (const auto& f : flat) {
    if (auto n = as_number(f)) {
      coeff = coeff * *n;
      continue;
    }
    auto [b, e] = base_exponent(f);
    auto it = exps.find(b);
    if (it == exps.end()) {
      exps.emplace(b, e);
      order.push_back(b);
    } else {
      it->second = canonical_plus({it->second, e});
    }
  }
  if (coeff.exact && coeff.q == 0) return integer(0);
  std::vector<Expr> factors;
  for (const auto& b : order) {
    Expr p = canonical_power(b, exps.at(b));
    if (auto n = as_number(p)) {
      coeff = coeff * *n;
    } else if (p.is_app("Times")) {
      for (const auto& f : p.args()) {
        if (auto m = as_number(f)) {
          coeff = coeff * *m;
        } else {
          factors.push_back(f);
        }
      }
    } else {
      factors.push_back(p);
    }
  }
  if (coeff.exact && coeff.q == 0) return integer(0);
  std::sort(factors.begin(), factors.end(), factor_less);
  if (!coeff.is_one()) factors.insert(factors.begin(), from_number(coeff));
  if (factors.empty()) return one();
  if (factors.size() == 1) return factors[0];
  return app("Times", std::move(factors));
}

Expr canonical_power(const Expr& base, const Expr& exponent) {
  auto eq = as_rational(exponent);
  if (eq && *eq == 0) {
    if (auto b = as_number(base); b && b->is_zero()) return sym("Indeterminate");
    return one();
  }
  if (eq && *eq == 1) return base;
  if (auto b = as_number(base)) {
    if (auto r = numeric_power(*b, exponent)) return *r;
    return app("Power", {base, exponent});
  }
  if (exponent.is_int()) {
    if (base.is_app("Power", 2)) return canonical_power(base.arg(0), canonical_times({base.arg(1), exponent}));
    if (base.is_app("Times")) {
      std::vector<Expr> fs;
      for (const auto& f : base.args()) fs.push_back(canonical_power(f, exponent));
      return canonical_times(fs);
    }
  }
  return app("Power", {base, exponent});
}

}  // namespace casbridge::cas
