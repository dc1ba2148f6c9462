#include "casbridge/cas/factor.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "casbridge/cas/canonical.hpp"
#include "casbridge/cas/number.hpp"
#include "casbridge/error.hpp"

namespace casbridge::cas {

namespace {

// Dense univariate polynomial, coefficients from degree 0 upwards.
using UPoly = std::vector<mpq_class>;

void trim(UPoly& u) {
  while (!u.empty() && u.back() == 0) u.pop_back();
}

long deg(const UPoly& u) { return static_cast<long>(u.size()) - 1; }

UPoly derivative(const UPoly& u) {
  UPoly d;
  for (std::size_t i = 1; i < u.size(); ++i) d.push_back(u[i] * static_cast<long>(i));
  trim(d);
  return d;
}

UPoly sub(UPoly a, const UPoly& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

std::pair<UPoly, UPoly> divmod(UPoly a, const UPoly& b) {
  if (b.empty()) throw EvalError("polynomial division by zero");
  UPoly q;
  if (deg(a) >= deg(b)) q.assign(a.size() - b.size() + 1, 0);
  while (!a.empty() && deg(a) >= deg(b)) {
    std::size_t shift = a.size() - b.size();
    mpq_class c = a.back() / b.back();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    trim(a);
  }
  trim(q);
  return {q, a};
}

UPoly monic(UPoly u) {
  if (u.empty()) return u;
  mpq_class l = u.back();
  for (auto& c : u) c /= l;
  return u;
}

UPoly gcd(UPoly a, UPoly b) {
  while (!b.empty()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

UPoly exact_div(const UPoly& a, const UPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.empty()) throw EvalError("inexact polynomial division");
  return q;
}

/// Scale to integer coefficients with gcd 1 and positive leading coefficient.
UPoly primitive(const UPoly& u) {
  if (u.empty()) return u;
  mpz_class g = 0, l = 1;
  for (const auto& c : u) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  mpq_class s(l, g);
  s.canonicalize();
  if (u.back() < 0) s = -s;
  UPoly r;
  for (const auto& c : u) r.push_back(c * s);
  return r;
}

UPoly dense(const Poly& p, const Expr& var) {
  UPoly u(p.degree(var) + 1, 0);
  for (const auto& [m, c] : p.terms()) {
    if (m.empty()) {
      u[0] += c;
    } else if (m.size() == 1 && m[0].first == var) {
      u[m[0].second] += c;
    } else {
      throw UnsupportedShape("polynomial is not univariate in " + render(var));
    }
  }
  trim(u);
  return u;
}

Poly sparse(const UPoly& u, const Expr& var) {
  Poly p;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i == 0) {
      p.add_term({}, u[i]);
    } else {
      p.add_term({{var, i}}, u[i]);
    }
  }
  return p;
}

std::vector<mpz_class> divisors(mpz_class n) {
  n = abs(n);
  std::vector<std::pair<mpz_class, unsigned>> primes;
  for (mpz_class p = 2; p * p <= n && p < 1000000; ++p) {
    unsigned k = 0;
    while (n % p == 0) {
      n /= p;
      ++k;
    }
    if (k) primes.emplace_back(p, k);
  }
  // A leftover cofactor is treated as prime; if it is not, some divisors are
  // missed and fewer candidate roots are tried, which is still sound.
  if (n > 1) primes.emplace_back(n, 1);
  std::vector<mpz_class> out{1};
  for (const auto& [p, k] : primes) {
    std::size_t base = out.size();
    mpz_class pk = 1;
    for (unsigned e = 1; e <= k; ++e) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  return out;
}

bool is_root(const UPoly& u, const mpq_class& r) {
  mpq_class v = 0;
  for (auto it = u.rbegin(); it != u.rend(); ++it) v = v * r + *it;
  return v == 0;
}

std::vector<mpq_class> roots_of(const UPoly& prim) {
  std::vector<mpq_class> out;
  if (prim.empty()) return out;
  UPoly u = prim;
  std::size_t zeros = 0;
  while (zeros < u.size() && u[zeros] == 0) ++zeros;
  if (zeros) {
    out.push_back(0);
    u.erase(u.begin(), u.begin() + static_cast<long>(zeros));
  }
  if (deg(u) < 1) return out;
  u = primitive(u);
  auto ps = divisors(u.front().get_num());
  auto qs = divisors(u.back().get_num());
  for (const auto& p : ps) {
    for (const auto& q : qs) {
      for (int s : {1, -1}) {
        mpq_class r(p * s, q);
        r.canonicalize();
        if (std::find(out.begin(), out.end(), r) == out.end() && is_root(u, r)) out.push_back(r);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

const UPoly& cyclotomic_dense(unsigned n) {
  static std::mutex mu;
  static std::map<unsigned, UPoly> cache;
  std::lock_guard<std::mutex> lock(mu);
  for (unsigned k = 1; k <= n; ++k) {
    if (cache.count(k)) continue;
    UPoly u(k + 1, 0);
    u[0] = -1;
    u[k] = 1;
    for (unsigned d = 1; d < k; ++d) {
      if (k % d == 0) u = exact_div(u, cache.at(d));
    }
    cache.emplace(k, std::move(u));
  }
  return cache.at(n);
}

constexpr unsigned kMaxCyclotomic = 24;

/// Split a square-free primitive polynomial into primitive factors.
std::vector<UPoly> split_squarefree(UPoly u) {
  std::vector<UPoly> out;
  for (const auto& r : roots_of(u)) {
    UPoly lin = primitive(UPoly{-r, 1});
    u = exact_div(u, lin);
    out.push_back(lin);
  }
  u = primitive(u);
  if (deg(u) >= 3) {
    for (unsigned k = 3; k <= kMaxCyclotomic; ++k) {
      const UPoly& phi = cyclotomic_dense(k);
      if (deg(phi) > deg(u)) continue;
      auto [q, r] = divmod(u, phi);
      if (r.empty()) {
        out.push_back(phi);
        u = primitive(q);
      }
      if (deg(u) < 2) break;
    }
  }
  if (deg(u) >= 1) out.push_back(u);
  return out;
}

struct UFactors {
  std::vector<std::pair<UPoly, unsigned long>> factors;
};

UFactors factor_dense(const UPoly& f) {
  UFactors out;
  if (deg(f) < 1) return out;
  UPoly g = primitive(f);
  std::size_t zeros = 0;
  while (zeros < g.size() && g[zeros] == 0) ++zeros;
  if (zeros) {
    out.factors.push_back({UPoly{0, 1}, zeros});
    g.erase(g.begin(), g.begin() + static_cast<long>(zeros));
  }
  if (deg(g) < 1) return out;
  // Yun's square-free decomposition over the rationals.
  UPoly dg = derivative(g);
  UPoly b = gcd(g, dg);
  UPoly c = exact_div(g, b);
  UPoly d = sub(exact_div(dg, b), derivative(c));
  unsigned long i = 1;
  while (deg(c) >= 1) {
    UPoly a = gcd(c, d);
    if (deg(a) >= 1) {
      for (auto& p : split_squarefree(primitive(a))) out.factors.push_back({p, i});
    }
    c = exact_div(c, a);
    d = sub(exact_div(d, a), derivative(c));
    ++i;
  }
  return out;
}

Poly homogenize(const UPoly& u, const Expr& x, const Expr& y) {
  Poly p;
  auto d = static_cast<unsigned long>(deg(u));
  for (std::size_t j = 0; j < u.size(); ++j) {
    Monomial m;
    if (j > 0) m.emplace_back(x, j);
    if (d - j > 0) m.emplace_back(y, d - j);
    std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
    p.add_term(m, u[j]);
  }
  return p;
}

mpq_class leading_in(const Poly& p) {
  // Coefficient of the largest monomial; used only to fix the content.
  return p.terms().rbegin()->second;
}

}  // namespace

Poly Factorization::expand() const {
  Poly p = Poly::constant(content);
  for (const auto& [f, m] : factors) p = p * f.pow(m);
  return p;
}

Factorization factor_poly(const Poly& p) {
  Factorization out;
  if (p.is_constant()) {
    out.content = p.constant_term();
    return out;
  }
  auto vars = p.variables();
  if (vars.size() == 1) {
    for (auto& [u, m] : factor_dense(dense(p, vars[0])).factors) out.factors.push_back({sparse(u, vars[0]), m});
  } else if (vars.size() == 2 && p.is_homogeneous()) {
    const Expr& x = vars[0];
    const Expr& y = vars[1];
    // Dehomogenize with y = 1 and factor the univariate image.
    UPoly f(p.degree(x) + 1, 0);
    for (const auto& [m, c] : p.terms()) {
      unsigned long k = 0;
      for (const auto& [v, e] : m) {
        if (v == x) k = e;
      }
      f[k] += c;
    }
    trim(f);
    unsigned long ydeg = p.total_degree() - static_cast<unsigned long>(deg(f));
    if (ydeg) out.factors.push_back({Poly::variable(y), ydeg});
    for (auto& [u, m] : factor_dense(f).factors) out.factors.push_back({homogenize(u, x, y), m});
  } else if (p.terms().size() == 1) {
    const auto& [mono, c] = *p.terms().begin();
    out.content = c;
    for (const auto& [v, e] : mono) out.factors.push_back({Poly::variable(v), e});
    return out;
  } else {
    throw UnsupportedShape("only univariate or homogeneous bivariate polynomials can be factored");
  }
  Poly prod = Poly::constant(1);
  for (const auto& [f, m] : out.factors) prod = prod * f.pow(m);
  out.content = leading_in(p) / leading_in(prod);
  return out;
}

Expr factor(const Expr& e) {
  Factorization f = factor_poly(Poly::from_expr(e));
  // Fold a unit -1 into a factor of odd multiplicity.
  if (f.content == -1) {
    for (auto& [p, m] : f.factors) {
      if (m % 2 == 1) {
        p = -p;
        f.content = 1;
        break;
      }
    }
  }
  std::vector<Expr> parts{from_rational(f.content)};
  for (const auto& [p, m] : f.factors) parts.push_back(canonical_power(p.to_expr(), integer(static_cast<long>(m))));
  return canonical_times(parts);
}

std::vector<mpq_class> rational_roots(const Poly& p, const Expr& var) { return roots_of(primitive(dense(p, var))); }

Poly cyclotomic(unsigned n, const Expr& var) {
  return sparse(cyclotomic_dense(n), var);
}

}  // namespace casbridge::cas
