#include <functional>
#include <set>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/bridge/translate.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/prover/prover.hpp"
#include "casbridge/tactics/tactics.hpp"

namespace casbridge::prover {

using kernel::Expr;

cas::Expr to_cas_calculus(const Expr& proof, const tactics::CasEval& eval) {
  cas::Expr r = eval("LeanProof[" + cas::render(bridge::reflect(proof)) + "]");
  if (cas::is_failure(r)) {
    std::string kind = r.arity() >= 1 && r.arg(0).is_str() ? r.arg(0).str() : "";
    std::string msg = r.arity() >= 2 && r.arg(1).is_str() ? r.arg(1).str() : cas::render(r);
    if (kind == "UnsupportedProofConstant") throw UnsupportedProofConstant(msg);
    throw TranslationFailed(kind + ": " + msg);
  }
  return r;
}

DeclInfo get_decl_info(const kernel::Environment& env, const kernel::Name& name) {
  const kernel::Declaration* d = env.find(name);
  if (!d) throw UnknownDeclaration(name.str());
  return {d->name.str(), kernel::to_string(d->kind), kernel::pretty(env, d->type), bridge::reflect(d->type), d->doc};
}

namespace {

Expr close_over(const std::vector<Expr>& locals, Expr e, bool pi) {
  for (auto it = locals.rbegin(); it != locals.rend(); ++it) {
    Expr body = kernel::abstract(e, *it);
    e = pi ? kernel::mk_pi(it->pretty_name(), kernel::BinderInfo::Default, it->type(), body)
           : kernel::mk_lambda(it->pretty_name(), kernel::BinderInfo::Default, it->type(), body);
  }
  return e;
}

void split_and(const Expr& e, std::vector<Expr>& out) {
  if (e.is_app() && kernel::app_fn(e).is_const() && kernel::app_fn(e).name() == kernel::Name("and") &&
      kernel::app_args(e).size() == 2) {
    split_and(kernel::app_args(e)[0], out);
    split_and(kernel::app_args(e)[1], out);
  } else {
    out.push_back(e);
  }
}

tactics::LinAtom negated(tactics::LinAtom a) {
  using tactics::LinRel;
  if (a.rel == LinRel::Eq) throw UnsupportedFragment("cannot negate an equation");
  // not (t <= 0) is -t < 0; not (t < 0) is -t <= 0.
  for (auto& [k, c] : a.terms) c = -c;
  a.constant = -a.constant;
  a.rel = a.rel == LinRel::Le ? LinRel::Lt : LinRel::Le;
  return a;
}

ProveResult summary(const kernel::Environment& env, const tactics::VerifiedResult& v, const Expr& closed) {
  ProveResult out;
  out.status = "proved";
  out.statement = closed;
  out.proof = cas::app("Verified", {cas::str(v.method), bridge::reflect(v.statement)});
  out.explode.push_back({0, 0, v.method, {}, closed, "", {}});
  (void)env;
  return out;
}

}  // namespace

ProveResult prove_for_cas(const kernel::Environment& env, const cas::Expr& f, const std::string& tactic,
                          const tactics::CasEval& eval) {
  static const std::set<std::string> known{"intuit", "norm_num", "ring", "linarith"};
  if (!known.count(tactic)) throw TacticFailed("unknown tactic " + tactic);
  bridge::RuleRegistry reg = bridge::make_prelude_registry(env);
  bool props = tactic == "intuit";
  bridge::OpenTerm open;
  try {
    open = bridge::elaborate_open(reg, f, props ? kernel::mk_prop() : kernel::mk_const("real"), kernel::mk_prop());
  } catch (const Error& err) {
    throw TranslationFailed(err.what());
  }
  const Expr& stmt = open.term;
  const std::vector<Expr>& locals = open.locals;
  const std::vector<std::string>& names = open.names;
  Expr closed = close_over(locals, stmt, true);

  try {
    if (tactic == "intuit") {
      AtomTable atoms;
      for (std::size_t i = 0; i < names.size(); ++i) atoms.add(locals[i], names[i]);
      PropFormula pf = prop_of_kernel(env, stmt, atoms);
      auto proof = intuit(pf, atoms);
      if (!proof) throw TacticFailed("intuit: no intuitionistic proof of " + to_string(pf));
      ProveResult out;
      out.status = "proved";
      out.statement = closed;
      Expr closed_proof = close_over(locals, *proof, false);
      kernel::TypeChecker tc(env);
      tc.check(closed_proof, closed);
      out.explode = explode(env, closed_proof);
      out.proof = to_cas_calculus(*proof, eval);
      return out;
    }
    if (tactic == "norm_num") {
      auto v = tactics::norm_num(env, stmt);
      if (!kernel::alpha_equal(v.statement, stmt)) throw TacticFailed("norm_num: statement is false");
      return summary(env, v, closed);
    }
    // ring and linarith work under the hypotheses of an arrow chain.
    std::vector<Expr> hyps;
    Expr goal = stmt;
    while (goal.kind() == kernel::ExprKind::Pi && !kernel::has_loose_bvar(goal.body(), 0)) {
      split_and(goal.type(), hyps);
      goal = goal.body();
    }
    if (tactic == "ring") {
      if (!hyps.empty()) throw TacticFailed("ring: goal has hypotheses");
      auto args = kernel::app_args(goal);
      if (!(goal.is_app() && kernel::app_fn(goal).is_const() && kernel::app_fn(goal).name() == kernel::Name("eq") &&
            args.size() == 3)) {
        throw TacticFailed("ring: goal is not an equation");
      }
      return summary(env, tactics::eq_by_ring(env, args[1], args[2]), closed);
    }
    std::vector<tactics::LinAtom> atoms;
    for (const auto& h : hyps) atoms.push_back(tactics::lin_atom_of(env, h));
    if (!(goal.is_const() && goal.name() == kernel::Name("false"))) atoms.push_back(negated(tactics::lin_atom_of(env, goal)));
    tactics::FarkasOracle fm = tactics::fm_oracle();
    tactics::FarkasOracle remote = tactics::cas_oracle(eval);
    auto v = tactics::linarith(atoms, [&](const std::vector<tactics::LinAtom>& a) {
      auto c = fm(a);
      return c ? c : remote(a);
    });
    return summary(env, v, closed);
  } catch (const TacticFailed&) {
    throw;
  } catch (const Error& err) {
    throw TacticFailed(tactic + ": " + err.what());
  }
}

}  // namespace casbridge::prover
