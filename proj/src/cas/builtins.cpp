#include <set>

#include "casbridge/cas/canonical.hpp"
#include "casbridge/cas/engine.hpp"
#include "casbridge/cas/factor.hpp"
#include "casbridge/cas/linalg.hpp"
#include "casbridge/cas/lp.hpp"
#include "casbridge/cas/match.hpp"
#include "casbridge/cas/number.hpp"
#include "casbridge/cas/plot.hpp"
#include "casbridge/cas/solve.hpp"
#include "casbridge/error.hpp"

namespace casbridge::cas {

namespace {

using Result = std::optional<Expr>;

Expr boolean(bool b) { return sym(b ? "True" : "False"); }

std::vector<Expr> as_sequence(const Expr& e, std::string_view head) {
  if (e.is_app(head)) return e.args();
  return {e};
}

std::vector<Expr> symbol_list(const Expr& e) {
  std::vector<Expr> out = as_sequence(e, "List");
  for (const auto& v : out) {
    if (v.is_int() || v.is_real() || v.is_str()) throw EvalError("not a variable: " + render(v));
  }
  return out;
}

Result unchanged_if_equal(const Expr& e, Expr r) {
  if (r == e) return std::nullopt;
  return r;
}

// ---- arithmetic -----------------------------------------------------------

Result plus(Context&, const Expr& e) { return unchanged_if_equal(e, canonical_plus(e.args())); }
Result times(Context&, const Expr& e) { return unchanged_if_equal(e, canonical_times(e.args())); }

Result power(Context&, const Expr& e) {
  if (e.arity() != 2) return std::nullopt;
  return unchanged_if_equal(e, canonical_power(e.arg(0), e.arg(1)));
}

Result rational(Context&, const Expr& e) {
  if (e.arity() != 2 || !e.arg(0).is_int() || !e.arg(1).is_int()) return std::nullopt;
  if (e.arg(1).integer() == 0) return failure("DivisionByZero", render(e));
  mpq_class q(e.arg(0).integer(), e.arg(1).integer());
  q.canonicalize();
  return unchanged_if_equal(e, from_rational(q));
}

Result minus(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  return app("Times", {integer(-1), e.arg(0)});
}

Result subtract(Context&, const Expr& e) {
  if (e.arity() != 2) return std::nullopt;
  return app("Plus", {e.arg(0), app("Times", {integer(-1), e.arg(1)})});
}

Result divide(Context&, const Expr& e) {
  if (e.arity() != 2) return std::nullopt;
  return app("Times", {e.arg(0), app("Power", {e.arg(1), integer(-1)})});
}

Result sqrt_(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  return app("Power", {e.arg(0), app("Rational", {integer(1), integer(2)})});
}

// ---- relations and logic --------------------------------------------------

bool literal(const Expr& e) { return is_numeric(e) || e.is_str(); }

Result equal(Context&, const Expr& e) {
  if (e.arity() < 2) return sym("True");
  bool all_numbers = true, all_literals = true, all_same = true;
  for (const auto& a : e.args()) {
    all_numbers = all_numbers && is_numeric(a);
    all_literals = all_literals && literal(a);
    all_same = all_same && a == e.arg(0);
  }
  if (all_numbers) {
    for (std::size_t i = 0; i + 1 < e.arity(); ++i) {
      if (compare_values(*as_number(e.arg(i)), *as_number(e.arg(i + 1))) != 0) return sym("False");
    }
    return sym("True");
  }
  if (all_same) return sym("True");
  if (all_literals) return sym("False");
  return std::nullopt;
}

Result unequal(Context& ctx, const Expr& e) {
  if (e.arity() != 2) return std::nullopt;
  auto r = equal(ctx, app("Equal", e.args()));
  if (!r) return std::nullopt;
  return boolean(r->is_sym("False"));
}

template <typename Pred>
Result order_relation(const Expr& e, Pred ok) {
  if (e.arity() < 2) return sym("True");
  for (const auto& a : e.args()) {
    if (!is_numeric(a)) return std::nullopt;
  }
  for (std::size_t i = 0; i + 1 < e.arity(); ++i) {
    if (!ok(compare_values(*as_number(e.arg(i)), *as_number(e.arg(i + 1))))) return sym("False");
  }
  return sym("True");
}

Result less(Context&, const Expr& e) { return order_relation(e, [](int c) { return c < 0; }); }
Result less_equal(Context&, const Expr& e) { return order_relation(e, [](int c) { return c <= 0; }); }
Result greater(Context&, const Expr& e) { return order_relation(e, [](int c) { return c > 0; }); }
Result greater_equal(Context&, const Expr& e) { return order_relation(e, [](int c) { return c >= 0; }); }

Result connective(const Expr& e, const char* unit, const char* absorbing) {
  std::vector<Expr> rest;
  for (const auto& a : e.args()) {
    if (a.is_sym(absorbing)) return sym(absorbing);
    if (a.is_app(e.head_name())) {
      rest.insert(rest.end(), a.args().begin(), a.args().end());
    } else if (!a.is_sym(unit)) {
      rest.push_back(a);
    }
  }
  if (rest.empty()) return sym(unit);
  if (rest.size() == 1) return rest[0];
  return unchanged_if_equal(e, app(e.head(), std::move(rest)));
}

Result and_(Context&, const Expr& e) { return connective(e, "True", "False"); }
Result or_(Context&, const Expr& e) { return connective(e, "False", "True"); }

Result not_(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  if (e.arg(0).is_sym("True")) return sym("False");
  if (e.arg(0).is_sym("False")) return sym("True");
  return std::nullopt;
}

// ---- definitions and holding ---------------------------------------------

Result set(Context& ctx, const Expr& e) {
  if (e.arity() != 2) return std::nullopt;
  ctx.define({e.arg(0), e.arg(1), false});
  return e.arg(1);
}

Result set_delayed(Context& ctx, const Expr& e) {
  if (e.arity() != 2) return std::nullopt;
  ctx.define({e.arg(0), e.arg(1), true});
  return sym("Null");
}

Result compound(Context& ctx, const Expr& e) {
  Expr last = sym("Null");
  for (const auto& a : e.args()) last = ctx.evaluate_nested(a);
  return last;
}

Result release_hold(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  const Expr& x = e.arg(0);
  if ((x.is_app("Hold") || x.is_app("HoldForm")) && x.arity() == 1) return x.arg(0);
  return x;
}

Result activate(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  return strip_inactive(e.arg(0));
}

// ---- algebra --------------------------------------------------------------

Result factor_(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  return factor(e.arg(0));
}

Result expand(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  try {
    return Poly::from_expr(e.arg(0)).to_expr();
  } catch (const NotAPolynomial&) {
    return e.arg(0);
  }
}

Expr numericize(const Expr& e) {
  if (auto q = as_rational(e)) return real(q->get_d());
  if (!e.is_app()) return e;
  std::vector<Expr> args;
  for (const auto& a : e.args()) args.push_back(numericize(a));
  return app(e.head(), std::move(args));
}

Result n_(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  return numericize(e.arg(0));
}

// ---- linear algebra, linear programming, solving --------------------------

Result lu(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  auto m = matrix_from_expr(e.arg(0));
  if (!m) return failure("NotAMatrix", render(e.arg(0)));
  auto r = lu_decompose(*m);
  return list({matrix_to_expr(r.L), matrix_to_expr(r.U)});
}

Result find_instance_(Context&, const Expr& e) {
  if (e.arity() < 2 || e.arity() > 3) return std::nullopt;
  auto vars = symbol_list(e.arg(1));
  auto point = find_instance(e.arg(0), vars);
  if (!point) return list({});
  std::vector<Expr> rules;
  for (std::size_t i = 0; i < vars.size(); ++i) rules.push_back(app("Rule", {vars[i], from_rational((*point)[i])}));
  return list({list(std::move(rules))});
}

// Held, so that constant hypotheses such as 1 <= 0 survive; only the sides
// of each relation are evaluated.
Result lp_certificate(Context& ctx, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  Expr held = e.arg(0).is_sym() ? ctx.evaluate_nested(e.arg(0)) : e.arg(0);
  std::vector<Expr> hyps;
  for (const auto& raw : as_sequence(held, "List")) {
    if (!raw.is_app() || raw.arity() != 2) throw UnsupportedFragment("hypothesis must be a binary relation: " + render(raw));
    hyps.push_back(app(raw.head(), {ctx.evaluate_nested(raw.arg(0)), ctx.evaluate_nested(raw.arg(1))}));
  }
  std::set<Expr, ExprLess> seen;
  for (const auto& h : hyps) {
    for (const auto& side : h.args()) {
      try {
        for (const auto& v : Poly::from_expr(side).variables()) seen.insert(v);
      } catch (const NotAPolynomial& err) {
        throw UnsupportedFragment(err.detail());
      }
    }
  }
  std::vector<Expr> vars(seen.begin(), seen.end());
  std::vector<LinRow> rows;
  for (const auto& h : hyps) rows.push_back(linear_rows(h, vars).at(0));
  auto c = farkas_certificate(vars.size(), rows);
  if (!c) return failure("NoCertificate", "the hypotheses are satisfiable");
  std::vector<Expr> out;
  for (const auto& v : *c) out.push_back(integer(v));
  return list(std::move(out));
}

bool is_inequality(const Expr& x) {
  return x.is_app("Less") || x.is_app("LessEqual") || x.is_app("Greater") || x.is_app("GreaterEqual") ||
         x.is_app("Unequal");
}

// Solve[eqs, vars] and Solve[eqs, vars, Reals | Rationals]. Inequalities in
// the conjunction filter the solutions of the equations.
Result solve(Context& ctx, const Expr& e) {
  if (e.arity() != 2 && e.arity() != 3) return std::nullopt;
  if (e.arity() == 3 && !e.arg(2).is_sym("Reals") && !e.arg(2).is_sym("Rationals")) {
    throw UnsupportedSystem("domain " + render(e.arg(2)));
  }
  std::vector<Expr> eqs, conds;
  for (const auto& x : as_sequence(e.arg(0), e.arg(0).is_app("And") ? "And" : "List")) {
    if (x.is_sym("True")) continue;
    if (is_inequality(x)) {
      conds.push_back(x);
      continue;
    }
    if (!x.is_app("Equal", 2)) throw UnsupportedSystem("not an equation: " + render(x));
    eqs.push_back(x);
  }
  auto vars = symbol_list(e.arg(1));
  std::vector<Poly> polys;
  for (const auto& q : eqs) {
    try {
      polys.push_back(Poly::from_expr(q.arg(0)) - Poly::from_expr(q.arg(1)));
    } catch (const NotAPolynomial& err) {
      throw UnsupportedSystem(err.detail());
    }
  }
  std::vector<Expr> out;
  for (const auto& s : solve_polys(polys, vars)) {
    std::vector<Expr> rules;
    for (std::size_t i = 0; i < vars.size(); ++i) rules.push_back(app("Rule", {vars[i], from_rational(s[i])}));
    bool keep = true;
    for (const auto& c : conds) {
      Expr v = ctx.evaluate_nested(app("ReplaceAll", {c, list(rules)}));
      if (v.is_sym("False")) {
        keep = false;
      } else if (!v.is_sym("True")) {
        throw UnsupportedSystem("cannot decide " + render(v));
      }
    }
    if (keep) out.push_back(list(std::move(rules)));
  }
  return list(std::move(out));
}

Result plot(Context& ctx, const Expr& e) {
  if (e.arity() != 2 || !e.arg(1).is_app("List", 3) || !e.arg(1).arg(0).is_sym()) return std::nullopt;
  const Expr& f = e.arg(0);
  const Expr& x = e.arg(1).arg(0);
  auto lo = as_rational(ctx.evaluate_nested(e.arg(1).arg(1)));
  auto hi = as_rational(ctx.evaluate_nested(e.arg(1).arg(2)));
  if (!lo || !hi || *lo >= *hi) throw EvalError("plot range must be exact numbers lo < hi");
  std::string svg = plot_svg(
      [&](const mpq_class& q) -> std::optional<double> {
        Expr v = ctx.evaluate_nested(app("N", {substitute(f, {{x.name(), from_rational(q)}})}));
        auto n = as_number(v);
        if (!n) throw EvalError("non-numeric value " + render(v) + " at " + x.name() + " = " + render(from_rational(q)));
        return n->to_double();
      },
      *lo, *hi);
  return app("Graphics", {str(svg)});
}

// ---- lists ------------------------------------------------------------------

Result length(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  return integer(static_cast<long>(e.arg(0).is_app() ? e.arg(0).arity() : 0));
}

Result part(Context&, const Expr& e) {
  if (e.arity() < 2) return std::nullopt;
  Expr cur = e.arg(0);
  for (std::size_t k = 1; k < e.arity(); ++k) {
    if (!e.arg(k).is_int()) return std::nullopt;
    long i = e.arg(k).integer().get_si();
    if (i == 0) {
      cur = cur.is_app() ? cur.head() : sym(cur.is_sym() ? "Symbol" : cur.is_str() ? "String" : cur.is_int() ? "Integer" : "Real");
      continue;
    }
    long n = cur.is_app() ? static_cast<long>(cur.arity()) : 0;
    if (i < 0) i += n + 1;
    if (i < 1 || i > n) return failure("PartError", "part " + render(e.arg(k)) + " of " + render(cur) + " does not exist");
    cur = cur.arg(static_cast<std::size_t>(i - 1));
  }
  return cur;
}

Result map(Context&, const Expr& e) {
  if (e.arity() != 2 || !e.arg(1).is_app()) return std::nullopt;
  std::vector<Expr> out;
  for (const auto& a : e.arg(1).args()) out.push_back(app(e.arg(0), {a}));
  return app(e.arg(1).head(), std::move(out));
}

Result prepend(Context&, const Expr& e) {
  if (e.arity() != 2 || !e.arg(0).is_app()) return std::nullopt;
  auto args = e.arg(0).args();
  args.insert(args.begin(), e.arg(1));
  return app(e.arg(0).head(), std::move(args));
}

Result append(Context&, const Expr& e) {
  if (e.arity() != 2 || !e.arg(0).is_app()) return std::nullopt;
  auto args = e.arg(0).args();
  args.push_back(e.arg(1));
  return app(e.arg(0).head(), std::move(args));
}

Expr values_of(const Expr& e) {
  if (e.is_app("Rule", 2)) return e.arg(1);
  if (e.is_app("List")) {
    std::vector<Expr> out;
    for (const auto& a : e.args()) out.push_back(values_of(a));
    return list(std::move(out));
  }
  throw EvalError("Values expects rules: " + render(e));
}

Result values(Context&, const Expr& e) {
  if (e.arity() != 1) return std::nullopt;
  return values_of(e.arg(0));
}

Result first(Context&, const Expr& e) {
  if (e.arity() != 1 || !e.arg(0).is_app() || e.arg(0).arity() == 0) return std::nullopt;
  return e.arg(0).arg(0);
}

Result last(Context&, const Expr& e) {
  if (e.arity() != 1 || !e.arg(0).is_app() || e.arg(0).arity() == 0) return std::nullopt;
  return e.arg(0).args().back();
}

Result rest(Context&, const Expr& e) {
  if (e.arity() != 1 || !e.arg(0).is_app() || e.arg(0).arity() == 0) return std::nullopt;
  auto args = e.arg(0).args();
  args.erase(args.begin());
  return app(e.arg(0).head(), std::move(args));
}

Expr replace_all(const Expr& e, const std::vector<Expr>& rules) {
  for (const auto& r : rules) {
    if (auto b = match(r.arg(0), e)) return substitute(r.arg(1), *b);
  }
  if (!e.is_app()) return e;
  std::vector<Expr> args;
  for (const auto& a : e.args()) args.push_back(replace_all(a, rules));
  return app(replace_all(e.head(), rules), std::move(args));
}

Result replace_all_(Context&, const Expr& e) {
  if (e.arity() != 2) return std::nullopt;
  auto rules = as_sequence(e.arg(1), "List");
  for (const auto& r : rules) {
    if (!r.is_app("Rule", 2)) return std::nullopt;
  }
  return replace_all(e.arg(0), rules);
}

// ---- the structural part of LeanForm ---------------------------------------

Result lean_form(Context& ctx, const Expr& e) {
  if (e.arity() == 1) return app("LeanForm", {e.arg(0), list({})});
  if (e.arity() != 2 || !e.arg(1).is_app("List")) return std::nullopt;
  const Expr& x = e.arg(0);
  const Expr& env = e.arg(1);
  if (x.is_app("LeanApp", 2)) {
    return app("LeanApp", {app("LeanForm", {x.arg(0), env}), app("LeanForm", {x.arg(1), env})});
  }
  if (x.is_app("LeanVar", 1) && x.arg(0).is_int()) {
    const mpz_class& i = x.arg(0).integer();
    if (i < 0 || i >= env.arity()) {
      return failure("BinderDepthError", "LeanVar[" + i.get_str() + "] under " + std::to_string(env.arity()) + " binders");
    }
    return env.arg(i.get_ui());
  }
  if (x.is_app("LeanLambda", 4)) {
    Expr s = ctx.fresh_symbol("s");
    Expr body = ctx.evaluate_nested(app("LeanForm", {x.arg(3), app("Prepend", {env, s})}));
    if (is_failure(body)) return body;
    return app("Function", {s, body});
  }
  return x;
}

Result lean_convert(Context&, const Expr& e) { return app("LeanForm", e.args()); }

Expr hypothesis_name(std::size_t depth) { return sym(depth == 0 ? "h" : "h" + std::to_string(depth)); }

Result lean_proof(Context& ctx, const Expr& e) {
  if (e.arity() == 1) return app("LeanProof", {e.arg(0), list({})});
  if (e.arity() != 2 || !e.arg(1).is_app("List")) return std::nullopt;
  const Expr& x = e.arg(0);
  const Expr& env = e.arg(1);
  if (x.is_app("LeanApp", 2)) {
    return app("ImpElim", {app("LeanProof", {x.arg(0), env}), app("LeanProof", {x.arg(1), env})});
  }
  if (x.is_app("LeanVar", 1) && x.arg(0).is_int()) {
    const mpz_class& i = x.arg(0).integer();
    if (i < 0 || i >= env.arity()) return failure("BinderDepthError", render(x));
    return app("Hyp", {env.arg(i.get_ui())});
  }
  if (x.is_app("LeanLambda", 4)) {
    Expr h = hypothesis_name(env.arity());
    Expr body = ctx.evaluate_nested(app("LeanProof", {x.arg(3), app("Prepend", {env, h})}));
    if (is_failure(body)) return body;
    return app("ImpIntro", {h, body});
  }
  if (x.is_app("LeanConst") && x.arity() >= 1 && x.arg(0).is_str()) {
    return failure("UnsupportedProofConstant", x.arg(0).str());
  }
  return failure("UnsupportedProofConstant", render(x));
}

}  // namespace

const std::unordered_map<std::string, Builtin>& builtins() {
  static const std::unordered_map<std::string, Builtin> table{
      {"Plus", plus},
      {"Times", times},
      {"Power", power},
      {"Rational", rational},
      {"Minus", minus},
      {"Subtract", subtract},
      {"Divide", divide},
      {"Sqrt", sqrt_},
      {"Equal", equal},
      {"Unequal", unequal},
      {"Less", less},
      {"LessEqual", less_equal},
      {"Greater", greater},
      {"GreaterEqual", greater_equal},
      {"And", and_},
      {"Or", or_},
      {"Not", not_},
      {"Set", set},
      {"SetDelayed", set_delayed},
      {"CompoundExpression", compound},
      {"ReleaseHold", release_hold},
      {"Activate", activate},
      {"Factor", factor_},
      {"Expand", expand},
      {"N", n_},
      {"LUDecomposition", lu},
      {"FindInstance", find_instance_},
      {"LPCertificate", lp_certificate},
      {"Solve", solve},
      {"Plot", plot},
      {"Length", length},
      {"Part", part},
      {"Map", map},
      {"Prepend", prepend},
      {"Append", append},
      {"Values", values},
      {"First", first},
      {"Last", last},
      {"Rest", rest},
      {"ReplaceAll", replace_all_},
      {"LeanForm", lean_form},
      {"LeanConvert", lean_convert},
      {"LeanProof", lean_proof},
  };
  return table;
}

}  // namespace casbridge::cas
