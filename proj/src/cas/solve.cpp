#include "casbridge/cas/solve.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "casbridge/cas/factor.hpp"
#include "casbridge/error.hpp"

namespace casbridge::cas {

namespace {

using Solution = std::map<Expr, mpq_class, ExprLess>;

bool contains(const std::vector<Expr>& xs, const Expr& x) { return std::find(xs.begin(), xs.end(), x) != xs.end(); }

std::vector<Expr> without(std::vector<Expr> xs, const Expr& x) {
  xs.erase(std::remove(xs.begin(), xs.end(), x), xs.end());
  return xs;
}

/// Coefficient c when every monomial mentioning v is exactly c*v.
std::optional<mpq_class> linear_coefficient(const Poly& p, const Expr& v) {
  std::optional<mpq_class> c;
  for (const auto& [m, k] : p.terms()) {
    bool mentions = std::any_of(m.begin(), m.end(), [&](const auto& t) { return t.first == v; });
    if (!mentions) continue;
    if (m.size() != 1 || m[0].second != 1) return std::nullopt;
    c = k;
  }
  return c;
}

std::vector<Solution> solve_rec(std::vector<Poly> eqs, const std::vector<Expr>& unknowns, int depth) {
  if (depth > 64) throw UnsupportedSystem("system is too deep");
  std::vector<Poly> live;
  for (auto& p : eqs) {
    if (p.is_zero()) continue;
    if (p.is_constant()) return {};
    for (const auto& v : p.variables()) {
      if (!contains(unknowns, v)) throw UnsupportedSystem("unknown symbol " + render(v));
    }
    live.push_back(std::move(p));
  }
  if (live.empty()) {
    if (!unknowns.empty()) throw UnsupportedSystem("system does not determine " + render(unknowns.front()));
    return {Solution{}};
  }
  for (std::size_t i = 0; i < live.size(); ++i) {
    auto vs = live[i].variables();
    if (vs.size() != 1) continue;
    const Expr& v = vs[0];
    std::vector<mpq_class> roots;
    for (const auto& [f, mult] : factor_poly(live[i]).factors) {
      if (f.degree(v) != 1) throw UnsupportedSystem("equation has non-rational roots in " + render(v));
      roots.push_back(-f.constant_term() / f.coefficient({{v, 1}}));
    }
    std::vector<Solution> out;
    for (const auto& r : roots) {
      std::vector<Poly> next;
      for (const auto& p : live) next.push_back(p.substitute(v, Poly::constant(r)));
      for (auto& s : solve_rec(next, without(unknowns, v), depth + 1)) {
        s[v] = r;
        out.push_back(std::move(s));
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < live.size(); ++i) {
    for (const auto& v : live[i].variables()) {
      auto c = linear_coefficient(live[i], v);
      if (!c) continue;
      Poly value = (live[i] - Poly::variable(v).scaled(*c)).scaled(-1 / *c);
      std::vector<Poly> next;
      for (std::size_t j = 0; j < live.size(); ++j) {
        if (j != i) next.push_back(live[j].substitute(v, value));
      }
      std::vector<Solution> out;
      for (auto& s : solve_rec(next, without(unknowns, v), depth + 1)) {
        Poly x = value;
        for (const auto& [w, q] : s) x = x.substitute(w, Poly::constant(q));
        if (!x.is_constant()) throw UnsupportedSystem("system does not determine " + render(v));
        s[v] = x.constant_term();
        out.push_back(std::move(s));
      }
      return out;
    }
  }
  throw UnsupportedSystem("nonlinear system is outside the supported fragment");
}

}  // namespace

std::vector<std::vector<mpq_class>> solve_polys(const std::vector<Poly>& eqs, const std::vector<Expr>& vars) {
  std::vector<std::vector<mpq_class>> out;
  for (const auto& s : solve_rec(eqs, vars, 0)) {
    std::vector<mpq_class> row;
    for (const auto& v : vars) row.push_back(s.at(v));
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace casbridge::cas
