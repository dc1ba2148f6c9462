#include "casbridge/cas/lp.hpp"

#include <algorithm>
#include <map>

#include "casbridge/cas/poly.hpp"
#include "casbridge/error.hpp"

namespace casbridge::cas {

namespace {

class Tableau {
 public:
  Tableau(const Matrix& A, const std::vector<Sense>& senses, const std::vector<mpq_class>& b) : n_(A.empty() ? 0 : A[0].size()) {
    const std::size_t m = A.size();
    std::vector<Sense> s = senses;
    std::vector<std::vector<mpq_class>> rows = A;
    std::vector<mpq_class> rhs = b;
    for (std::size_t i = 0; i < m; ++i) {
      if (rhs[i] < 0) {
        for (auto& v : rows[i]) v = -v;
        rhs[i] = -rhs[i];
        if (s[i] == Sense::Le) s[i] = Sense::Ge;
        else if (s[i] == Sense::Ge) s[i] = Sense::Le;
      }
    }
    std::size_t cols = n_;
    for (auto sense : s) cols += sense == Sense::Eq ? 1 : sense == Sense::Le ? 1 : 2;
    width_ = cols;
    artificial_.assign(cols, false);
    T_.assign(m, std::vector<mpq_class>(cols + 1, 0));
    basis_.assign(m, 0);
    std::size_t next = n_;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n_; ++j) T_[i][j] = rows[i][j];
      T_[i][cols] = rhs[i];
      if (s[i] == Sense::Le) {
        T_[i][next] = 1;
        basis_[i] = next++;
      } else {
        if (s[i] == Sense::Ge) T_[i][next++] = -1;
        T_[i][next] = 1;
        artificial_[next] = true;
        basis_[i] = next++;
      }
    }
  }

  LPResult solve(const std::vector<mpq_class>& c) {
    LPResult out;
    if (std::find(artificial_.begin(), artificial_.end(), true) != artificial_.end()) {
      std::vector<mpq_class> phase1(width_, 0);
      for (std::size_t j = 0; j < width_; ++j) {
        if (artificial_[j]) phase1[j] = -1;
      }
      run(phase1, true);
      if (objective(phase1) < 0) return out;
      drive_out_artificials();
    }
    std::vector<mpq_class> cost(width_, 0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = c[j];
    if (!run(cost, false)) {
      out.status = LPResult::Unbounded;
      return out;
    }
    out.status = LPResult::Optimal;
    out.x.assign(n_, 0);
    for (std::size_t i = 0; i < T_.size(); ++i) {
      if (basis_[i] < n_) out.x[basis_[i]] = T_[i][width_];
    }
    out.value = objective(cost);
    return out;
  }

 private:
  mpq_class objective(const std::vector<mpq_class>& cost) const {
    mpq_class v = 0;
    for (std::size_t i = 0; i < T_.size(); ++i) v += cost[basis_[i]] * T_[i][width_];
    return v;
  }

  void pivot(std::size_t r, std::size_t c) {
    mpq_class p = T_[r][c];
    for (auto& v : T_[r]) v /= p;
    for (std::size_t i = 0; i < T_.size(); ++i) {
      if (i == r || T_[i][c] == 0) continue;
      mpq_class f = T_[i][c];
      for (std::size_t j = 0; j <= width_; ++j) T_[i][j] -= f * T_[r][j];
    }
    basis_[r] = c;
  }

  /// Returns false when unbounded.
  bool run(const std::vector<mpq_class>& cost, bool allow_artificial) {
    while (true) {
      std::size_t enter = width_;
      for (std::size_t j = 0; j < width_ && enter == width_; ++j) {
        if (!allow_artificial && artificial_[j]) continue;
        mpq_class rc = cost[j];
        for (std::size_t i = 0; i < T_.size(); ++i) rc -= cost[basis_[i]] * T_[i][j];
        if (rc > 0) enter = j;
      }
      if (enter == width_) return true;
      std::size_t leave = T_.size();
      mpq_class best;
      for (std::size_t i = 0; i < T_.size(); ++i) {
        if (T_[i][enter] <= 0) continue;
        mpq_class ratio = T_[i][width_] / T_[i][enter];
        if (leave == T_.size() || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == T_.size()) return false;
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < T_.size();) {
      if (!artificial_[basis_[i]]) {
        ++i;
        continue;
      }
      std::size_t j = 0;
      while (j < width_ && (artificial_[j] || T_[i][j] == 0)) ++j;
      if (j < width_) {
        pivot(i, j);
        ++i;
      } else {
        T_.erase(T_.begin() + static_cast<long>(i));
        basis_.erase(basis_.begin() + static_cast<long>(i));
      }
    }
  }

  std::size_t n_;
  std::size_t width_ = 0;
  std::vector<bool> artificial_;
  std::vector<std::vector<mpq_class>> T_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LPResult lp_maximize(const Matrix& A, const std::vector<Sense>& senses, const std::vector<mpq_class>& b,
                     const std::vector<mpq_class>& c) {
  if (A.empty()) {
    LPResult out;
    bool bounded = std::all_of(c.begin(), c.end(), [](const mpq_class& v) { return v <= 0; });
    out.status = bounded ? LPResult::Optimal : LPResult::Unbounded;
    out.x.assign(c.size(), 0);
    return out;
  }
  return Tableau(A, senses, b).solve(c);
}

std::optional<std::vector<mpq_class>> find_point(std::size_t nvars, const std::vector<LinRow>& rows) {
  // x = p - q with p, q >= 0; an extra column e <= 1 is maximized as the
  // common slack of the strict rows.
  bool strict = std::any_of(rows.begin(), rows.end(), [](const LinRow& r) { return r.rel == Rel::Lt; });
  const std::size_t cols = 2 * nvars + (strict ? 1 : 0);
  Matrix A;
  std::vector<Sense> senses;
  std::vector<mpq_class> b;
  for (const auto& r : rows) {
    std::vector<mpq_class> row(cols, 0);
    for (std::size_t j = 0; j < nvars; ++j) {
      mpq_class a = j < r.a.size() ? r.a[j] : mpq_class(0);
      row[j] = a;
      row[nvars + j] = -a;
    }
    if (r.rel == Rel::Lt) row[2 * nvars] = 1;
    A.push_back(std::move(row));
    senses.push_back(r.rel == Rel::Eq ? Sense::Eq : Sense::Le);
    b.push_back(-r.k);
  }
  std::vector<mpq_class> c(cols, 0);
  if (strict) {
    std::vector<mpq_class> row(cols, 0);
    row[2 * nvars] = 1;
    A.push_back(std::move(row));
    senses.push_back(Sense::Le);
    b.push_back(1);
    c[2 * nvars] = 1;
  }
  if (A.empty()) return std::vector<mpq_class>(nvars, 0);
  LPResult res = lp_maximize(A, senses, b, c);
  if (res.status != LPResult::Optimal) return std::nullopt;
  if (strict && res.value <= 0) return std::nullopt;
  std::vector<mpq_class> x(nvars);
  for (std::size_t j = 0; j < nvars; ++j) x[j] = res.x[j] - res.x[nvars + j];
  return x;
}

std::optional<std::vector<mpz_class>> farkas_certificate(std::size_t nvars, const std::vector<LinRow>& rows) {
  // Dual system over multipliers c_i.
  const std::size_t m = rows.size();
  std::vector<LinRow> dual;
  for (std::size_t j = 0; j < nvars; ++j) {
    LinRow r{std::vector<mpq_class>(m, 0), 0, Rel::Eq};
    for (std::size_t i = 0; i < m; ++i) r.a[i] = j < rows[i].a.size() ? rows[i].a[j] : mpq_class(0);
    dual.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].rel == Rel::Eq) continue;
    LinRow r{std::vector<mpq_class>(m, 0), 0, Rel::Le};
    r.a[i] = -1;
    dual.push_back(std::move(r));
  }
  LinRow nonneg{std::vector<mpq_class>(m, 0), 0, Rel::Le};
  LinRow positive{std::vector<mpq_class>(m, 0), 0, Rel::Lt};
  for (std::size_t i = 0; i < m; ++i) {
    nonneg.a[i] = -rows[i].k;
    positive.a[i] = -rows[i].k - (rows[i].rel == Rel::Lt ? 1 : 0);
  }
  dual.push_back(nonneg);
  dual.push_back(positive);
  auto c = find_point(m, dual);
  if (!c) return std::nullopt;
  mpz_class l = 1, g = 0;
  for (const auto& v : *c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  std::vector<mpz_class> out;
  for (const auto& v : *c) {
    mpq_class s = v * l;
    out.push_back(s.get_num());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out.back().get_mpz_t());
  }
  if (g > 1) {
    for (auto& v : out) v /= g;
  }
  return out;
}

std::vector<LinRow> linear_rows(const Expr& relation, const std::vector<Expr>& vars) {
  static const std::vector<std::string> heads{"Less", "LessEqual", "Greater", "GreaterEqual", "Equal"};
  std::string h = relation.is_app() ? relation.head_name() : "";
  if (std::find(heads.begin(), heads.end(), h) == heads.end() || relation.arity() < 2) {
    throw UnsupportedFragment("not a linear relation: " + render(relation));
  }
  std::vector<LinRow> out;
  for (std::size_t i = 0; i + 1 < relation.arity(); ++i) {
    Expr lhs = relation.arg(i), rhs = relation.arg(i + 1);
    if (h == "Greater" || h == "GreaterEqual") std::swap(lhs, rhs);
    Poly p;
    try {
      p = Poly::from_expr(lhs) - Poly::from_expr(rhs);
    } catch (const NotAPolynomial& e) {
      throw UnsupportedFragment(e.detail());
    }
    LinRow row{std::vector<mpq_class>(vars.size(), 0), 0,
               h == "Equal" ? Rel::Eq : (h == "Less" || h == "Greater") ? Rel::Lt : Rel::Le};
    for (const auto& [mono, c] : p.terms()) {
      if (mono.empty()) {
        row.k = c;
        continue;
      }
      auto it = mono.size() == 1 && mono[0].second == 1 ? std::find(vars.begin(), vars.end(), mono[0].first) : vars.end();
      if (it == vars.end()) throw UnsupportedFragment("nonlinear or unknown term in " + render(relation));
      row.a[static_cast<std::size_t>(it - vars.begin())] = c;
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

using Clause = std::vector<Expr>;
using Dnf = std::vector<Clause>;

constexpr std::size_t kMaxClauses = 4096;

Dnf conjoin(const Dnf& a, const Dnf& b) {
  Dnf out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      Clause c = x;
      c.insert(c.end(), y.begin(), y.end());
      out.push_back(std::move(c));
      if (out.size() > kMaxClauses) throw UnsupportedFragment("constraint is too large");
    }
  }
  return out;
}

Dnf to_dnf(const Expr& e, bool negated) {
  if (e.is_sym("True") || e.is_sym("False")) {
    bool value = e.is_sym("True") != negated;
    return value ? Dnf{Clause{}} : Dnf{};
  }
  if (e.is_app("Not", 1)) return to_dnf(e.arg(0), !negated);
  bool is_and = e.is_app("And") || e.is_app("List");
  if (is_and || e.is_app("Or")) {
    if (is_and != negated) {
      Dnf acc{Clause{}};
      for (const auto& a : e.args()) acc = conjoin(acc, to_dnf(a, negated));
      return acc;
    }
    Dnf acc;
    for (const auto& a : e.args()) {
      Dnf d = to_dnf(a, negated);
      acc.insert(acc.end(), d.begin(), d.end());
      if (acc.size() > kMaxClauses) throw UnsupportedFragment("constraint is too large");
    }
    return acc;
  }
  if (!e.is_app() || e.arity() < 2) throw UnsupportedFragment("not a constraint: " + render(e));
  std::string h = e.head_name();
  if (h == "Unequal") {
    std::vector<Expr> pairs;
    for (std::size_t i = 0; i < e.arity(); ++i) {
      for (std::size_t j = i + 1; j < e.arity(); ++j) {
        Expr a = e.arg(i), b = e.arg(j);
        pairs.push_back(app("Or", {app("Less", {a, b}), app("Greater", {a, b})}));
      }
    }
    return to_dnf(app("And", pairs), negated);
  }
  static const std::map<std::string, std::string> flip{{"Less", "GreaterEqual"},   {"LessEqual", "Greater"},
                                                      {"Greater", "LessEqual"},   {"GreaterEqual", "Less"},
                                                      {"Equal", "Unequal"}};
  if (!flip.count(h)) throw UnsupportedFragment("not a constraint: " + render(e));
  if (e.arity() > 2) {
    std::vector<Expr> pairs;
    for (std::size_t i = 0; i + 1 < e.arity(); ++i) pairs.push_back(app(h, {e.arg(i), e.arg(i + 1)}));
    return to_dnf(app("And", pairs), negated);
  }
  if (negated) return to_dnf(app(flip.at(h), e.args()), false);
  return Dnf{Clause{e}};
}

}  // namespace

std::optional<std::vector<mpq_class>> find_instance(const Expr& constraints, const std::vector<Expr>& vars) {
  for (const auto& clause : to_dnf(constraints, false)) {
    std::vector<LinRow> rows;
    for (const auto& atom : clause) {
      auto r = linear_rows(atom, vars);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    if (auto x = find_point(vars.size(), rows)) return x;
  }
  return std::nullopt;
}

}  // namespace casbridge::cas
