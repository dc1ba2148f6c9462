#include <sstream>

#include "casbridge/error.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/prover/prover.hpp"

namespace casbridge::prover {

namespace {

using kernel::Expr;
using kernel::ExprKind;

class Exploder {
 public:
  explicit Exploder(const kernel::Environment& env) : tc_(env) {}

  std::size_t go(const Expr& e, std::size_t depth) {
    switch (e.kind()) {
      case ExprKind::Lam: {
        Expr l = kernel::mk_local(kernel::fresh_unique_name(), e.name(), e.binder_info(), e.type());
        std::size_t var = emit(depth + 1, "assumption", {}, e.type(), e.name().str());
        steps_[var].local = l;
        hyps_[l.name()] = var;
        std::size_t body = go(kernel::instantiate(e.body(), l), depth + 1);
        Expr goal = infer(e);
        const char* rule = tc_.is_proof(l) ? "→I" : "∀I";
        return emit(depth, rule, {var, body}, goal);
      }
      case ExprKind::Local: {
        auto it = hyps_.find(e.name());
        if (it == hyps_.end()) {
          std::size_t free = emit(depth, "assumption", {}, e.type(), e.pretty_name().str());
          steps_[free].local = e;
          return free;
        }
        return emit(depth, steps_[it->second].hyp, {it->second}, e.type());
      }
      case ExprKind::Const: return emit(depth, e.name().str(), {}, infer(e));
      case ExprKind::App: {
        const Expr& f = kernel::app_fn(e);
        if (f.is_const() && kernel::app_args(e).size() > arity(f)) {
          // Over-applied lemma: the lemma step, then eliminate the rest.
          auto all = kernel::app_args(e);
          std::size_t k = arity(f);
          Expr inner = kernel::mk_app(f, std::vector<Expr>(all.begin(), all.begin() + static_cast<long>(k)));
          std::vector<std::size_t> args{go(inner, depth)};
          for (std::size_t i = k; i < all.size(); ++i) {
            if (tc_.is_proof(all[i])) args.push_back(go(all[i], depth));
          }
          return emit(depth, "→E", args, infer(e));
        }
        std::vector<std::size_t> args;
        if (!f.is_const()) args.push_back(go(f, depth));
        for (const auto& a : kernel::app_args(e)) {
          if (tc_.is_proof(a)) args.push_back(go(a, depth));
        }
        return emit(depth, f.is_const() ? f.name().str() : "→E", args, infer(e));
      }
      case ExprKind::Let: return emit(depth, "let", {}, infer(e));
      case ExprKind::MVar: return emit(depth, "mvar", {}, e.type());
      default: return emit(depth, "term", {}, infer(e));
    }
  }

  std::vector<ExplodeStep> steps_;

 private:
  Expr infer(const Expr& e) { return tc_.infer(e); }

  std::size_t arity(const Expr& c) {
    std::size_t n = 0;
    for (Expr t = tc_.infer(c); t.kind() == ExprKind::Pi; t = t.body()) ++n;
    return n;
  }

  std::size_t emit(std::size_t depth, std::string rule, std::vector<std::size_t> args, Expr goal, std::string hyp = "") {
    std::size_t idx = steps_.size();
    steps_.push_back({idx, depth, std::move(rule), std::move(args), std::move(goal), std::move(hyp), {}});
    return idx;
  }

  kernel::TypeChecker tc_;
  std::map<kernel::Name, std::size_t> hyps_;
};

}  // namespace

std::vector<ExplodeStep> explode(const kernel::Environment& env, const Expr& proof) {
  try {
    kernel::TypeChecker tc(env);
    if (!tc.is_proof(proof)) throw IllTypedProof("not a proof: " + kernel::print_raw(proof));
    Exploder ex(env);
    ex.go(proof, 0);
    return std::move(ex.steps_);
  } catch (const IllTypedProof&) {
    throw;
  } catch (const Error& err) {
    throw IllTypedProof(err.what());
  }
}

Expr replay_explode(const kernel::Environment& env, const std::vector<ExplodeStep>& steps) {
  if (steps.empty()) throw IllTypedProof("no steps");
  kernel::TypeChecker tc(env);
  std::vector<Expr> terms(steps.size());
  auto term = [&](std::size_t i, std::size_t at) -> const Expr& {
    if (i >= at) throw IllTypedProof("step " + std::to_string(at) + " refers forward to " + std::to_string(i));
    return terms[i];
  };
  try {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const ExplodeStep& s = steps[i];
      if (s.index != i) throw IllTypedProof("step indices are not consecutive");
      if (s.rule == "assumption") {
        std::string name = s.hyp.empty() ? "h" : s.hyp;
        if (s.local && s.local.is_local()) {
          if (!tc.is_def_eq(s.local.type(), s.goal)) throw IllTypedProof("assumption " + name + " changed its type");
          terms[i] = s.local;
        } else {
          terms[i] = kernel::mk_local(kernel::fresh_unique_name(), kernel::Name(name), kernel::BinderInfo::Default, s.goal);
        }
      } else if (s.args.size() == 1 && s.args[0] < i && steps[s.args[0]].rule == "assumption" &&
                 steps[s.args[0]].hyp == s.rule) {
        terms[i] = term(s.args[0], i);
      } else if ((s.rule == "→I" || s.rule == "∀I") && s.args.size() == 2) {
        const Expr& l = term(s.args[0], i);
        if (!l.is_local()) throw IllTypedProof("introduction of a non-variable at step " + std::to_string(i));
        terms[i] = kernel::mk_lambda(l.pretty_name(), kernel::BinderInfo::Default, l.type(),
                                     kernel::abstract(term(s.args[1], i), l));
      } else if (s.rule == "→E" && !s.args.empty()) {
        Expr t = term(s.args[0], i);
        for (std::size_t k = 1; k < s.args.size(); ++k) t = kernel::mk_app(t, term(s.args[k], i));
        terms[i] = t;
      } else if (const kernel::Declaration* d = env.find(s.rule)) {
        // Explicit binders whose domain is a proposition take the argument
        // steps in order; other explicit binders are left to unification
        // against the goal.
        std::vector<Expr> stand_ins;
        Expr pre = kernel::mk_const(d->name);
        Expr t = d->type;
        std::size_t next = 0;
        while (next < s.args.size() && t.kind() == ExprKind::Pi) {
          Expr b = kernel::mk_local(kernel::fresh_unique_name(), t.name(), t.binder_info(), t.type());
          if (t.binder_info() == kernel::BinderInfo::Default) {
            if (tc.is_def_eq(tc.infer(t.type()), kernel::mk_prop())) {
              const Expr& arg = term(s.args[next++], i);
              Expr stand = kernel::mk_local(kernel::fresh_unique_name(), "s", kernel::BinderInfo::Default, tc.infer(arg));
              stand_ins.push_back(stand);
              pre = kernel::mk_app(pre, stand);
            } else {
              pre = kernel::mk_app(pre, kernel::mk_placeholder());
            }
          }
          t = kernel::instantiate(t.body(), b);
        }
        if (next != s.args.size()) throw IllTypedProof("too many arguments for " + s.rule);
        Expr r = kernel::elaborate(env, pre, s.goal);
        for (std::size_t k = 0; k < stand_ins.size(); ++k) r = kernel::replace_local(r, stand_ins[k], term(s.args[k], i));
        terms[i] = r;
      } else {
        throw IllTypedProof("cannot replay rule '" + s.rule + "' at step " + std::to_string(i));
      }
      if (!tc.is_def_eq(tc.infer(terms[i]), s.goal)) {
        throw IllTypedProof("step " + std::to_string(i) + " does not prove its goal");
      }
    }
  } catch (const IllTypedProof&) {
    throw;
  } catch (const Error& err) {
    throw IllTypedProof(err.what());
  }
  return terms.back();
}

std::string render_explode(const kernel::Environment& env, const std::vector<ExplodeStep>& steps) {
  std::ostringstream out;
  for (const auto& s : steps) {
    out << s.index << "│" << std::string(2 * s.depth, ' ') << kernel::pretty(env, s.goal) << "  " << s.rule;
    if (!s.hyp.empty() && s.rule == "assumption") out << " " << s.hyp;
    if (!s.args.empty()) {
      out << " [";
      for (std::size_t k = 0; k < s.args.size(); ++k) out << (k ? ", " : "") << s.args[k];
      out << "]";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace casbridge::prover
