#include <cmath>
#include <set>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/cas/number.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/numeral.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/tactics/tactics.hpp"

namespace casbridge::tactics {

using kernel::Expr;
using kernel::mk_app;
using kernel::mk_const;

mpq_class eval_ground(const kernel::Environment& env, const Expr& e) {
  cas::Poly p;
  try {
    p = kernel_poly(env, e);
  } catch (const RingNormalizationFailed& err) {
    throw UnsupportedFragment(err.detail());
  }
  if (!p.is_constant()) throw NotGround("free variables in " + kernel::print_raw(e));
  return p.constant_term();
}

VerifiedResult norm_num(const kernel::Environment& env, const Expr& e) {
  const Expr& f = kernel::app_fn(e);
  auto args = kernel::app_args(e);
  std::string op = f.is_const() ? f.name().str() : "";
  bool holds = false;
  if ((op == "eq" || op == "ne") && args.size() == 3) {
    bool same = eval_ground(env, args[1]) == eval_ground(env, args[2]);
    holds = op == "eq" ? same : !same;
  } else if ((op == "lt" || op == "le" || op == "gt" || op == "ge") && args.size() == 4) {
    int c = cmp(eval_ground(env, args[2]), eval_ground(env, args[3]));
    holds = op == "lt" ? c < 0 : op == "le" ? c <= 0 : op == "gt" ? c > 0 : c >= 0;
  } else {
    throw UnsupportedFragment("not a numeral comparison: " + kernel::print_raw(e));
  }
  return {holds ? e : mk_app(mk_const("not"), e), "norm_num", false};
}

Expr rational_pre(const mpq_class& q) {
  Expr out = kernel::numeral_encode(abs(q.get_num()));
  if (q.get_den() != 1) out = mk_app(mk_const("div"), {out, kernel::numeral_encode(q.get_den())});
  return q < 0 ? mk_app(mk_const("neg"), out) : out;
}

namespace {

void split_and(const Expr& e, std::vector<Expr>& out) {
  const Expr& f = kernel::app_fn(e);
  auto args = kernel::app_args(e);
  if (f.is_const() && f.name().str() == "and" && args.size() == 2) {
    split_and(args[0], out);
    split_and(args[1], out);
  } else {
    out.push_back(e);
  }
}

Expr conjunction(const std::vector<Expr>& parts) {
  Expr out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) out = mk_app(mk_const("and"), {parts[i], out});
  return out;
}

std::string failure_kind(const cas::Expr& r) {
  return cas::is_failure(r) && r.arity() > 0 && r.arg(0).is_str() ? r.arg(0).str() : "";
}

std::string failure_text(const cas::Expr& r) {
  return r.arity() > 1 && r.arg(1).is_str() ? r.arg(1).str() : cas::render(r);
}

cas::Expr converted(const Expr& e) {
  return cas::app("Activate", {cas::app("LeanConvert", {bridge::reflect(e)})});
}

}  // namespace

SolveResult solve_polys(const CasEval& eval, const kernel::Environment& env, const Expr& goal) {
  std::vector<Expr> locals, types;
  Expr body = goal;
  while (true) {
    const Expr& f = kernel::app_fn(body);
    auto args = kernel::app_args(body);
    if (!(f.is_const() && f.name().str() == "Exists" && args.size() == 2 && args[1].kind() == kernel::ExprKind::Lam)) break;
    Expr x = kernel::mk_local(kernel::fresh_unique_name(), args[1].name(), kernel::BinderInfo::Default, args[0]);
    locals.push_back(x);
    types.push_back(args[0]);
    body = kernel::instantiate(args[1].body(), x);
  }
  if (locals.empty()) throw UnsupportedSystem("goal is not existential: " + kernel::print_raw(goal));
  std::vector<Expr> eqs;
  split_and(body, eqs);
  std::vector<cas::Expr> cas_eqs, cas_vars;
  for (const auto& q : eqs) {
    const Expr& f = kernel::app_fn(q);
    if (!(f.is_const() && f.name().str() == "eq")) throw UnsupportedSystem("not an equation: " + kernel::print_raw(q));
    cas_eqs.push_back(converted(q));
  }
  for (const auto& x : locals) cas_vars.push_back(bridge::reflect(x));
  cas::Expr cmd = cas::app("Values", {cas::app("Solve", {cas::list(cas_eqs), cas::list(cas_vars)})});
  cas::Expr r = eval(cas::render(cmd));
  if (failure_kind(r) == "UnsupportedSystem") throw UnsupportedSystem(failure_text(r));
  expect_success(r);
  if (!r.is_app("List")) throw UnsupportedSystem("unexpected answer " + cas::render(r));
  if (r.arity() == 0) throw NoSolution("the system has no rational solution");
  const cas::Expr& first = r.arg(0);
  if (!first.is_app("List", locals.size())) throw UnsupportedSystem("unexpected solution " + cas::render(first));
  SolveResult out;
  std::vector<Expr> values;
  for (std::size_t i = 0; i < locals.size(); ++i) {
    auto q = cas::as_rational(first.arg(i));
    if (!q) throw UnsupportedSystem("non-rational solution " + cas::render(first.arg(i)));
    out.witnesses.push_back(*q);
    values.push_back(kernel::elaborate(env, rational_pre(*q), types[i]));
  }
  for (const auto& q : eqs) {
    Expr inst = q;
    for (std::size_t i = 0; i < locals.size(); ++i) inst = kernel::replace_local(inst, locals[i], values[i]);
    VerifiedResult v = norm_num(env, inst);
    if (!kernel::alpha_equal(v.statement, inst)) throw VerificationFailed("solution does not satisfy " + kernel::print_raw(inst));
    out.checks.push_back(v);
  }
  out.proof = {goal, "solve_polys+norm_num", false};
  return out;
}

VerifiedResult verify_lu(const kernel::Environment& env, const cas::Matrix& m, const cas::Matrix& L, const cas::Matrix& U) {
  std::size_t n = m.size();
  auto square = [n](const cas::Matrix& a) {
    if (a.size() != n) return false;
    for (const auto& row : a) {
      if (row.size() != n) return false;
    }
    return true;
  };
  if (n == 0 || !square(m) || !square(L) || !square(U)) throw VerificationFailed("dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (L[i][i] != 1) throw VerificationFailed("L is not unit diagonal at " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j > i && L[i][j] != 0) throw VerificationFailed("L is not lower triangular");
      if (j < i && U[i][j] != 0) throw VerificationFailed("U is not upper triangular");
    }
  }
  Expr real = mk_const("real");
  std::vector<Expr> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Expr sum;
      for (std::size_t k = 0; k < n; ++k) {
        Expr term = mk_app(mk_const("mul"), {rational_pre(L[i][k]), rational_pre(U[k][j])});
        sum = k == 0 ? term : mk_app(mk_const("add"), {sum, term});
      }
      Expr stmt = kernel::elaborate(env, mk_app(mk_const("eq"), {sum, rational_pre(m[i][j])}));
      if (!kernel::alpha_equal(norm_num(env, stmt).statement, stmt)) {
        throw VerificationFailed("(L U)[" + std::to_string(i) + "][" + std::to_string(j) + "] differs from the input");
      }
      entries.push_back(stmt);
    }
  }
  return {conjunction(entries), "lu+norm_num", false};
}

LUCertificate lu_decomp_tactic(const CasEval& eval, const kernel::Environment& env, const cas::Matrix& m) {
  cas::Expr r = eval(cas::render(cas::app("LUDecomposition", {cas::matrix_to_expr(m)})));
  std::string kind = failure_kind(r);
  if (kind == "ZeroPivot") throw ZeroPivot(failure_text(r));
  if (kind == "NotSquare") throw NotSquare(failure_text(r));
  expect_success(r);
  std::optional<cas::Matrix> L, U;
  if (r.is_app("List", 2)) {
    L = cas::matrix_from_expr(r.arg(0));
    U = cas::matrix_from_expr(r.arg(1));
  }
  if (!L || !U) throw VerificationFailed("unexpected answer " + cas::render(r));
  return {*L, *U, verify_lu(env, m, *L, *U)};
}

Plausibility plausibility_check(const CasEval& eval, const std::vector<Expr>& hyps, const Expr& goal) {
  std::vector<Expr> locals;
  std::set<kernel::Name> seen;
  auto collect = [&](const Expr& e) {
    kernel::for_each(e, [&](const Expr& s) {
      if (s.is_local() && seen.insert(s.name()).second) locals.push_back(s);
      return true;
    });
  };
  std::vector<cas::Expr> parts;
  for (const auto& h : hyps) {
    collect(h);
    parts.push_back(converted(h));
  }
  collect(goal);
  parts.push_back(cas::app("Not", {converted(goal)}));
  std::vector<cas::Expr> vars;
  for (const auto& x : locals) vars.push_back(bridge::reflect(x));
  cas::Expr r = eval(cas::render(cas::app("FindInstance", {cas::app("And", parts), cas::list(vars)})));
  Plausibility out;
  if (cas::is_failure(r)) {
    out.reason = failure_kind(r) + ": " + failure_text(r);
    return out;
  }
  if (!r.is_app("List")) {
    out.reason = "unexpected answer " + cas::render(r);
    return out;
  }
  if (r.arity() == 0) {
    out.status = Plausibility::NoCountermodel;
    return out;
  }
  for (const auto& rule : r.arg(0).args()) {
    auto q = rule.is_app("Rule", 2) ? cas::as_rational(rule.arg(1)) : std::nullopt;
    if (!q) {
      out.reason = "unexpected assignment " + cas::render(rule);
      return out;
    }
    const cas::Expr& v = rule.arg(0);
    std::string name = v.is_app("LeanLocal", 4) && v.arg(1).is_str() ? v.arg(1).str() : cas::render(v);
    out.countermodel[name] = *q;
  }
  out.status = Plausibility::Countermodel;
  return out;
}

kernel::Environment axiomatize(const kernel::Environment& env, const kernel::Name& name, const Expr& stmt,
                               const std::string& source) {
  Expr t = kernel::type_check(env, stmt);
  if (!kernel::alpha_equal(t, kernel::mk_prop())) throw TypeError("not a proposition: " + kernel::print_raw(stmt));
  kernel::Declaration d;
  d.name = name;
  d.kind = kernel::DeclKind::TrustedAxiom;
  d.type = stmt;
  d.source = source;
  return env.add(std::move(d));
}

Approximation approx(const CasEval& eval, const kernel::Environment& env, const kernel::Name& name, const Expr& e,
                     unsigned digits) {
  cas::Expr cmd = cas::app("N", {converted(e)});
  cas::Expr r = expect_success(eval(cas::render(cmd)));
  auto n = cas::as_number(r);
  if (!n) throw EvalError("not a number: " + cas::render(r));
  double v = n->to_double();
  if (!std::isfinite(v)) throw EvalError("non-finite value " + cas::render(r));
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpq_class scaled = mpq_class(v) * scale;
  mpz_class fl = scaled.get_num() / scaled.get_den();
  if (scaled < 0 && fl * scaled.get_den() != scaled.get_num()) fl -= 1;
  Approximation out;
  out.lo = mpq_class(fl - 1, scale);
  out.hi = mpq_class(fl + 2, scale);
  out.lo.canonicalize();
  out.hi.canonicalize();
  Expr pe = kernel::erase_to_pre(env, e);
  Expr pre = mk_app(mk_const("and"), {mk_app(mk_const("lt"), {rational_pre(out.lo), pe}),
                                      mk_app(mk_const("lt"), {pe, rational_pre(out.hi)})});
  out.statement = kernel::elaborate(env, pre);
  out.env = axiomatize(env, name, out.statement,
                       cas::render(cmd) + " = " + cas::render(r));
  return out;
}

}  // namespace casbridge::tactics
