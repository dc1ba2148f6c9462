#include "casbridge/bridge/translate.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/numeral.hpp"

namespace casbridge::bridge {

using kernel::mk_app;
using kernel::mk_const;

RuleRegistry::RuleRegistry(kernel::Environment env) : env_(std::move(env)) {}

RuleRegistry RuleRegistry::with(SymRule r) const {
  RuleRegistry out = *this;
  out.sym_.push_back(std::move(r));
  return out;
}

RuleRegistry RuleRegistry::with(KeyedAppRule r) const {
  RuleRegistry out = *this;
  out.keyed_.push_back(std::move(r));
  return out;
}

RuleRegistry RuleRegistry::with(UnkeyedAppRule r) const {
  RuleRegistry out = *this;
  out.unkeyed_.push_back(std::move(r));
  return out;
}

std::vector<const KeyedAppRule*> RuleRegistry::keyed(const std::string& key) const {
  std::vector<const KeyedAppRule*> out;
  for (const auto& r : keyed_) {
    if (r.key == key) out.push_back(&r);
  }
  return out;
}

RuleRegistry load_sym_rules_text(const RuleRegistry& reg, const std::string& text) {
  RuleRegistry out = reg;
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw SyntaxError("line " + std::to_string(n) + ": expected 'Symbol = name'");
    std::string lhs = trim(line.substr(0, eq)), rhs = trim(line.substr(eq + 1));
    if (lhs.empty() || rhs.empty()) throw SyntaxError("line " + std::to_string(n) + ": expected 'Symbol = name'");
    out = out.with(SymRule{lhs, mk_const(kernel::Name::parse(rhs))});
  }
  return out;
}

RuleRegistry load_sym_rules(const RuleRegistry& reg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SyntaxError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_sym_rules_text(reg, ss.str());
}

kernel::Expr pexpr_of_mmexpr(const RuleRegistry& reg, const TransEnv& env, const cas::Expr& e) {
  switch (e.kind()) {
    case cas::Kind::Int: {
      kernel::Expr n = kernel::numeral_encode(abs(e.integer()));
      return e.integer() < 0 ? mk_app(mk_const("neg"), n) : n;
    }
    case cas::Kind::Str: throw NoApplicableRule("string literal " + cas::render(e));
    case cas::Kind::Real: throw NoApplicableRule("machine real " + cas::render(e));
    case cas::Kind::Sym: {
      if (auto it = env.find(e.name()); it != env.end()) return it->second;
      for (const auto& r : reg.sym_rules()) {
        if (r.cas_symbol == e.name()) return r.target;
      }
      throw NoApplicableRule("symbol " + e.name());
    }
    case cas::Kind::App: break;
  }
  std::string last;
  auto attempt = [&](auto&& f) -> std::optional<kernel::Expr> {
    try {
      return f();
    } catch (const Error& err) {
      last = err.what();
    } catch (const std::exception& err) {
      last = err.what();
    }
    return std::nullopt;
  };
  if (e.head().is_sym()) {
    for (const auto* r : reg.keyed(e.head().name())) {
      if (auto out = attempt([&] { return r->translate(reg, env, e.args()); })) return *out;
    }
  }
  for (const auto& r : reg.unkeyed()) {
    if (auto out = attempt([&] { return r.translate(reg, env, e.head(), e.args()); })) return *out;
  }
  std::string head = e.head().is_sym() ? e.head().name() : cas::render(e.head());
  throw NoApplicableRule("no rule translates " + head + (last.empty() ? "" : " (" + last + ")"));
}

namespace {

kernel::Expr tr(const RuleRegistry& reg, const TransEnv& env, const cas::Expr& e) { return pexpr_of_mmexpr(reg, env, e); }

KeyedAppRule fold_rule(std::string key, std::string op, std::function<kernel::Expr()> unit) {
  return {key, [key, op, unit](const RuleRegistry& reg, const TransEnv& env, const std::vector<cas::Expr>& args) {
            if (args.empty()) {
              if (!unit) throw NoApplicableRule(key + " needs arguments");
              return unit();
            }
            kernel::Expr acc = tr(reg, env, args[0]);
            for (std::size_t i = 1; i < args.size(); ++i) acc = mk_app(mk_const(kernel::Name::parse(op)), {acc, tr(reg, env, args[i])});
            return acc;
          }};
}

KeyedAppRule unary_rule(std::string key, std::string op) {
  return {key, [key, op](const RuleRegistry& reg, const TransEnv& env, const std::vector<cas::Expr>& args) {
            if (args.size() != 1) throw NoApplicableRule(key + " expects one argument");
            return mk_app(mk_const(kernel::Name::parse(op)), tr(reg, env, args[0]));
          }};
}

KeyedAppRule binary_rule(std::string key, std::string op) {
  return {key, [key, op](const RuleRegistry& reg, const TransEnv& env, const std::vector<cas::Expr>& args) {
            if (args.size() != 2) throw NoApplicableRule(key + " expects two arguments");
            return mk_app(mk_const(kernel::Name::parse(op)), {tr(reg, env, args[0]), tr(reg, env, args[1])});
          }};
}

// a R b R c is (a R b) and (b R c).
KeyedAppRule relation_rule(std::string key, std::string op) {
  return {key, [key, op](const RuleRegistry& reg, const TransEnv& env, const std::vector<cas::Expr>& args) {
            if (args.size() < 2) throw NoApplicableRule(key + " expects at least two arguments");
            std::vector<kernel::Expr> xs;
            for (const auto& a : args) xs.push_back(tr(reg, env, a));
            kernel::Expr acc;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
              kernel::Expr r = mk_app(mk_const(kernel::Name::parse(op)), {xs[i], xs[i + 1]});
              acc = acc ? mk_app(mk_const("and"), {acc, r}) : r;
            }
            return acc;
          }};
}

kernel::Expr bind_params(const RuleRegistry& reg, const TransEnv& env, const cas::Expr& params, const cas::Expr& body, bool pi,
                  const std::optional<cas::Expr>& condition = std::nullopt) {
  std::vector<cas::Expr> names = params.is_app("List") ? params.args() : std::vector<cas::Expr>{params};
  TransEnv inner = env;
  std::vector<kernel::Expr> locals;
  for (const auto& n : names) {
    if (!n.is_sym()) throw NoApplicableRule("binder must be a symbol: " + cas::render(n));
    kernel::Expr l = kernel::mk_local(kernel::fresh_unique_name(), kernel::Name(std::vector<std::string>{n.name()}),
                                      kernel::BinderInfo::Default, kernel::mk_placeholder());
    inner[n.name()] = l;
    locals.push_back(l);
  }
  // Element[x, dom] conjuncts of the condition give binder types.
  std::map<std::string, kernel::Expr> domains;
  std::vector<cas::Expr> rest;
  if (condition) {
    for (const auto& c : condition->is_app("And") ? condition->args() : std::vector<cas::Expr>{*condition}) {
      if (c.is_app("Element", 2) && c.arg(0).is_sym() && inner.count(c.arg(0).name()) &&
          std::find(names.begin(), names.end(), c.arg(0)) != names.end()) {
        domains[c.arg(0).name()] = tr(reg, env, c.arg(1));
      } else {
        rest.push_back(c);
      }
    }
  }
  kernel::Expr out = tr(reg, inner, body);
  if (!rest.empty()) out = kernel::mk_arrow(tr(reg, inner, rest.size() == 1 ? rest[0] : cas::app("And", rest)), out);
  for (std::size_t i = locals.size(); i-- > 0;) {
    auto make = pi ? kernel::mk_pi : kernel::mk_lambda;
    auto d = domains.find(names[i].name());
    kernel::Expr ty = d == domains.end() ? kernel::mk_placeholder() : d->second;
    out = make(locals[i].pretty_name(), kernel::BinderInfo::Default, ty, kernel::abstract(out, locals[i]));
  }
  return out;
}

kernel::Expr power(const RuleRegistry& reg, const TransEnv& env, const std::vector<cas::Expr>& args) {
  if (args.size() != 2 || !args[1].is_int()) throw NoApplicableRule("Power needs an integer exponent");
  kernel::Expr base = tr(reg, env, args[0]);
  const mpz_class& n = args[1].integer();
  if (n >= 0) return mk_app(mk_const("pow_nat"), {base, kernel::numeral_encode(n)});
  kernel::Expr one = kernel::numeral_encode(1);
  if (n == -1) return mk_app(mk_const("div"), {one, base});
  return mk_app(mk_const("div"), {one, mk_app(mk_const("pow_nat"), {base, kernel::numeral_encode(mpz_class(-n))})});
}

}  // namespace

RuleRegistry make_prelude_registry(const kernel::Environment& kenv) {
  RuleRegistry reg(kenv);
  auto numeral = [](long n) { return [n] { return kernel::numeral_encode(n); }; };
  reg = reg.with(fold_rule("Plus", "add", numeral(0)))
            .with(fold_rule("Times", "mul", numeral(1)))
            .with(fold_rule("And", "and", [] { return mk_const("true"); }))
            .with(fold_rule("Or", "or", [] { return mk_const("false"); }))
            .with(KeyedAppRule{"Power", power})
            .with(binary_rule("Rational", "div"))
            .with(binary_rule("Subtract", "sub"))
            .with(binary_rule("Divide", "div"))
            .with(unary_rule("Minus", "neg"))
            .with(unary_rule("Not", "not"))
            .with(binary_rule("Equivalent", "iff"))
            .with(relation_rule("Equal", "eq"))
            .with(binary_rule("Unequal", "ne"))
            .with(relation_rule("Less", "lt"))
            .with(relation_rule("LessEqual", "le"))
            .with(relation_rule("Greater", "gt"))
            .with(relation_rule("GreaterEqual", "ge"));
  reg = reg.with(KeyedAppRule{"Implies", [](const RuleRegistry& r, const TransEnv& env, const std::vector<cas::Expr>& a) {
    if (a.size() != 2) throw NoApplicableRule("Implies expects two arguments");
    return kernel::mk_arrow(tr(r, env, a[0]), tr(r, env, a[1]));
  }});
  reg = reg.with(KeyedAppRule{"Function", [](const RuleRegistry& r, const TransEnv& env, const std::vector<cas::Expr>& a) {
    if (a.size() != 2) throw NoApplicableRule("Function expects parameters and a body");
    return bind_params(r, env, a[0], a[1], false);
  }});
  reg = reg.with(KeyedAppRule{"ForAll", [](const RuleRegistry& r, const TransEnv& env, const std::vector<cas::Expr>& a) {
    if (a.size() == 2) return bind_params(r, env, a[0], a[1], true);
    if (a.size() == 3) return bind_params(r, env, a[0], a[2], true, a[1]);
    throw NoApplicableRule("ForAll expects two or three arguments");
  }});
  reg = reg.with(KeyedAppRule{"Exists", [](const RuleRegistry& r, const TransEnv& env, const std::vector<cas::Expr>& a) {
    if (a.size() != 2) throw NoApplicableRule("Exists expects two arguments");
    return mk_app(mk_const("Exists"), bind_params(r, env, a[0], a[1], false));
  }});
  for (const char* h : {"LeanVar", "LeanSort", "LeanConst", "LeanMVar", "LeanLocal", "LeanApp", "LeanLambda", "LeanPi",
                        "LeanLet", "LeanNatLit", "LeanPlaceholder"}) {
    std::string head = h;
    reg = reg.with(KeyedAppRule{head, [head](const RuleRegistry& r, const TransEnv&, const std::vector<cas::Expr>& a) {
      return kernel::erase_to_pre(r.env(), decode_reflection(cas::app(head, a)));
    }});
  }
  reg = reg.with(UnkeyedAppRule{"apply", [](const RuleRegistry& r, const TransEnv& env, const cas::Expr& head,
                                            const std::vector<cas::Expr>& args) {
    kernel::Expr f = tr(r, env, head);
    for (const auto& a : args) f = mk_app(f, tr(r, env, a));
    return f;
  }});
  reg = reg.with(UnkeyedAppRule{"strip Inactive", [](const RuleRegistry& r, const TransEnv& env, const cas::Expr& head,
                                                     const std::vector<cas::Expr>& args) {
    if (!head.is_app("Inactive", 1)) throw NoApplicableRule("not an Inactive head");
    return tr(r, env, cas::app(head.arg(0), args));
  }});
  reg = reg.with(UnkeyedAppRule{"splice Hold", [](const RuleRegistry& r, const TransEnv& env, const cas::Expr& head,
                                                  const std::vector<cas::Expr>& args) {
    std::vector<cas::Expr> spliced;
    bool any = false;
    for (const auto& a : args) {
      if (a.is_app("Hold")) {
        spliced.insert(spliced.end(), a.args().begin(), a.args().end());
        any = true;
      } else {
        spliced.push_back(a);
      }
    }
    if (!any) throw NoApplicableRule("no Hold to splice");
    return tr(r, env, cas::app(head, std::move(spliced)));
  }});
  return load_sym_rules(reg, cas::data_path("bridge_rules.txt"));
}

const RuleRegistry& prelude_registry() {
  static const RuleRegistry reg = make_prelude_registry(kernel::prelude());
  return reg;
}

cas::Expr lean_form(cas::Context& ctx, const cas::Expr& e, const std::vector<cas::Expr>& env) {
  cas::Expr r = ctx.evaluate(cas::app("LeanForm", {e, cas::list(env)}));
  if (cas::is_failure(r)) {
    std::string kind = r.arity() > 0 && r.arg(0).is_str() ? r.arg(0).str() : "";
    std::string msg = r.arity() > 1 && r.arg(1).is_str() ? r.arg(1).str() : cas::render(r);
    if (kind == "BinderDepthError") throw BinderDepthError(msg);
    throw EvalError(kind + ": " + msg);
  }
  return r;
}

}  // namespace casbridge::bridge
