#include <cctype>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/cas/wire.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/link/link.hpp"
#include "casbridge/tactics/tactics.hpp"

namespace casbridge::link {

using kernel::Expr;

// ---- CAS service ------------------------------------------------------------

CasService::CasService(std::shared_ptr<cas::GlobalContext> global) : global_(std::move(global)) {}

namespace {

// "as image <command>" asks for graphical output.
bool strip_image_annotation(std::string& src) {
  std::size_t i = 0;
  while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
  static const std::string tag = "as image";
  if (src.compare(i, tag.size(), tag) != 0) return false;
  std::size_t j = i + tag.size();
  if (j < src.size() && !std::isspace(static_cast<unsigned char>(src[j]))) return false;
  src = src.substr(j);
  return true;
}

std::string failure_text(const cas::Expr& f) {
  std::string kind = f.arity() > 0 && f.arg(0).is_str() ? f.arg(0).str() : "Failure";
  std::string msg = f.arity() > 1 && f.arg(1).is_str() ? f.arg(1).str() : cas::render(f);
  return kind + ": " + msg;
}

}  // namespace

Response CasService::handle(const Request& r) {
  if (r.op != "eval" && r.op != "eval_global") return Response::failure(r.id, "WireError: unsupported op " + r.op);
  if (r.op == "eval") {
    cas::Context ctx(global_, cas::Context::Scope::Local);
    return evaluate(ctx, r.id, r.payload.get<std::string>());
  }
  std::lock_guard<std::mutex> lock(global_mu_);
  cas::Context ctx(global_, cas::Context::Scope::Global);
  return evaluate(ctx, r.id, r.payload.get<std::string>());
}

Response CasService::evaluate(cas::Context& ctx, std::uint64_t id, std::string src) {
  bool image = strip_image_annotation(src);
  cas::Expr result;
  try {
    result = ctx.evaluate(cas::parse(src));
  } catch (const Error& e) {
    return Response::failure(id, e.what());
  }
  if (cas::is_failure(result)) {
    Response resp = Response::failure(id, failure_text(result));
    resp.result = cas::to_wire(result);
    return resp;
  }
  Response resp = Response::success(id, cas::to_wire(result));
  if (result.is_app("Graphics", 1) && result.arg(0).is_str()) {
    resp.display = "image";
    resp.image_svg = result.arg(0).str();
  } else if (image) {
    return Response::failure(id, "EvalError: as image: result is not a graphic: " + cas::render(result));
  }
  return resp;
}

// ---- kernel service -----------------------------------------------------------

KernelService::KernelService(kernel::Environment env, tactics::CasEval eval) : env_(std::move(env)), eval_(std::move(eval)) {}

Response KernelService::handle(const Request& r) {
  if (r.op != "kernel_cmd") return Response::failure(r.id, "WireError: unsupported op " + r.op);
  json args = r.payload.contains("args") ? r.payload["args"] : json::object();
  try {
    return Response::success(r.id, dispatch(r.payload["cmd"].get<std::string>(), args));
  } catch (const Error& e) {
    return Response::failure(r.id, e.what());
  } catch (const json::exception& e) {
    return Response::failure(r.id, std::string("WireError: ") + e.what());
  }
}

namespace {

std::string str_arg(const json& args, const char* name) {
  if (!args.is_object() || !args.contains(name) || !args[name].is_string()) {
    throw WireError(std::string("missing string argument '") + name + "'");
  }
  return args[name].get<std::string>();
}

std::vector<std::string> list_arg(const json& args, const char* name) {
  if (!args.is_object() || !args.contains(name) || !args[name].is_array()) {
    throw WireError(std::string("missing list argument '") + name + "'");
  }
  std::vector<std::string> out;
  for (const auto& x : args[name]) {
    if (!x.is_string()) throw WireError(std::string("argument '") + name + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

mpq_class rational_of(const json& x) {
  std::string s = x.is_string() ? x.get<std::string>() : x.is_number_integer() ? std::to_string(x.get<long long>()) : "";
  if (s.empty()) throw WireError("matrix entries must be integers or \"p/q\" strings");
  mpq_class q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw WireError("bad rational \"" + s + "\"");
  q.canonicalize();
  return q;
}

json matrix_json(const cas::Matrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& q : row) r.push_back(q.get_str());
    rows.push_back(std::move(r));
  }
  return rows;
}

json verified_json(const kernel::Environment& env, const tactics::VerifiedResult& v) {
  return {{"statement", kernel::pretty(env, v.statement)}, {"method", v.method}, {"trusted", v.trusted}};
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

// Several CAS propositions elaborated together, so a symbol is one local.
std::vector<Expr> elaborate_props(const bridge::RuleRegistry& reg, const std::vector<std::string>& sources,
                                  std::vector<Expr>* locals = nullptr) {
  if (sources.empty()) return {};
  std::vector<cas::Expr> parts;
  for (const auto& s : sources) parts.push_back(cas::parse(s));
  cas::Expr all = parts.size() == 1 ? parts[0] : cas::app("And", parts);
  bridge::OpenTerm open = bridge::elaborate_open(reg, all, kernel::mk_const("real"), kernel::mk_prop());
  if (locals) *locals = open.locals;
  std::vector<Expr> out;
  if (parts.size() == 1) {
    out.push_back(open.term);
  } else {
    split_and(open.term, out);
  }
  if (out.size() != parts.size()) throw TranslationFailed("conjunctions inside a hypothesis list are ambiguous");
  return out;
}

Expr close_pi(const std::vector<Expr>& locals, Expr e) {
  for (auto it = locals.rbegin(); it != locals.rend(); ++it) {
    e = kernel::mk_pi(it->pretty_name(), kernel::BinderInfo::Default, it->type(), kernel::abstract(e, *it));
  }
  return e;
}

json prove_json(const kernel::Environment& env, const prover::ProveResult& r) {
  return {{"status", r.status},
          {"statement", kernel::pretty(env, r.statement)},
          {"proof", cas::to_wire(r.proof)},
          {"proof_text", cas::render(r.proof)},
          {"explode", explode_to_json(env, r.explode)}};
}

}  // namespace

json KernelService::dispatch(const std::string& cmd, const json& args) {
  if (cmd == "get_decl_info") {
    prover::DeclInfo info = prover::get_decl_info(env_, kernel::Name(str_arg(args, "name")));
    json out{{"name", info.name}, {"kind", info.kind}, {"type", info.type}, {"type_expr", cas::to_wire(info.type_expr)}};
    if (info.doc) out["doc"] = *info.doc;
    return out;
  }
  if (cmd == "explode") {
    std::string name = str_arg(args, "name");
    const kernel::Declaration* d = env_.find(kernel::Name(name));
    if (!d) throw UnknownDeclaration(name);
    if (!d->value) throw IllTypedProof(name + " has no proof term");
    auto steps = prover::explode(env_, *d->value);
    return {{"name", name}, {"statement", kernel::pretty(env_, d->type)}, {"explode", explode_to_json(env_, steps)},
            {"text", prover::render_explode(env_, steps)}};
  }
  if (cmd == "prove") {
    cas::Expr f = args.contains("formula_expr") ? cas::from_wire(args["formula_expr"]) : cas::parse(str_arg(args, "formula"));
    return prove_json(env_, prover::prove_for_cas(env_, f, str_arg(args, "tactic"), eval_));
  }
  if (cmd == "run_tactic") return run_tactic(args);
  if (cmd == "axiomatize") {
    bridge::RuleRegistry reg = bridge::make_prelude_registry(env_);
    std::vector<Expr> locals;
    Expr body = elaborate_props(reg, {str_arg(args, "statement")}, &locals).at(0);
    Expr stmt = close_pi(locals, body);
    std::string name = str_arg(args, "name");
    env_ = tactics::axiomatize(env_, kernel::Name(name), stmt, args.value("source", std::string("kernel_cmd")));
    return {{"name", name}, {"kind", kernel::to_string(kernel::DeclKind::TrustedAxiom)},
            {"statement", kernel::pretty(env_, stmt)}};
  }
  throw WireError("unknown kernel command " + cmd);
}

json KernelService::run_tactic(const json& args) {
  std::string tactic = str_arg(args, "tactic");
  bridge::RuleRegistry reg = bridge::make_prelude_registry(env_);
  if (tactic == "factor") {
    bridge::OpenTerm open = bridge::elaborate_open(reg, cas::parse(str_arg(args, "expr")), kernel::mk_const("real"));
    tactics::FactorResult r = tactics::factor_tactic(eval_, env_, open.term);
    return {{"input", kernel::pretty(env_, open.term)},
            {"factored", kernel::pretty(env_, r.factored)},
            {"factored_raw", kernel::print_raw(r.factored)},
            {"verified", verified_json(env_, r.proof)}};
  }
  if (tactic == "linarith" && args.contains("hyps")) {
    std::vector<tactics::LinAtom> atoms;
    for (const auto& h : elaborate_props(reg, list_arg(args, "hyps"))) atoms.push_back(tactics::lin_atom_of(env_, h));
    std::string used = "fm";
    auto cert = tactics::fm_oracle()(atoms);
    if (!cert) {
      used = "cas";
      cert = tactics::cas_oracle(eval_)(atoms);
    }
    if (!cert) throw TacticFailed("linarith: no certificate (the hypotheses may be satisfiable)");
    if (!tactics::check_farkas(atoms, *cert)) throw CertificateRejected("linarith: " + used + " certificate rejected");
    tactics::VerifiedResult v = tactics::linarith(atoms, [&](const std::vector<tactics::LinAtom>&) { return cert; });
    json coeffs = json::array();
    for (const auto& c : cert->coeffs) coeffs.push_back(c.get_str());
    json hyps = json::array();
    for (const auto& a : atoms) hyps.push_back(tactics::to_string(a));
    return {{"verified", verified_json(env_, v)}, {"certificate", coeffs}, {"oracle", used}, {"hyps", hyps}};
  }
  if (tactic == "lu") {
    if (!args.contains("matrix") || !args["matrix"].is_array()) throw WireError("missing matrix argument");
    cas::Matrix m;
    for (const auto& row : args["matrix"]) {
      if (!row.is_array()) throw WireError("matrix rows must be arrays");
      std::vector<mpq_class> r;
      for (const auto& x : row) r.push_back(rational_of(x));
      m.push_back(std::move(r));
    }
    tactics::LUCertificate c = tactics::lu_decomp_tactic(eval_, env_, m);
    return {{"L", matrix_json(c.L)}, {"U", matrix_json(c.U)}, {"verified", verified_json(env_, c.proof)}};
  }
  if (tactic == "solve") {
    Expr goal = elaborate_props(reg, {str_arg(args, "goal")}).at(0);
    tactics::SolveResult r = tactics::solve_polys(eval_, env_, goal);
    json w = json::array();
    for (const auto& q : r.witnesses) w.push_back(q.get_str());
    return {{"witnesses", w}, {"verified", verified_json(env_, r.proof)}};
  }
  if (tactic == "plausible") {
    std::vector<std::string> sources = list_arg(args, "hyps");
    sources.push_back(str_arg(args, "goal"));
    std::vector<Expr> props = elaborate_props(reg, sources);
    Expr goal = props.back();
    props.pop_back();
    tactics::Plausibility p = tactics::plausibility_check(eval_, props, goal);
    static const char* names[] = {"no countermodel", "countermodel", "inconclusive"};
    json cm = json::object();
    for (const auto& [k, v] : p.countermodel) cm[k] = v.get_str();
    return {{"status", names[p.status]}, {"countermodel", cm}, {"reason", p.reason}};
  }
  if (tactic == "approx") {
    bridge::OpenTerm open = bridge::elaborate_open(reg, cas::parse(str_arg(args, "expr")), kernel::mk_const("real"));
    if (!open.locals.empty()) throw NotGround("approx needs a closed term");
    unsigned digits = args.value("digits", 4u);
    std::string name = str_arg(args, "name");
    tactics::Approximation a = tactics::approx(eval_, env_, kernel::Name(name), open.term, digits);
    env_ = a.env;
    return {{"name", name}, {"statement", kernel::pretty(env_, a.statement)}, {"lo", a.lo.get_str()}, {"hi", a.hi.get_str()}};
  }
  // Propositional and closed-goal tactics go through prove_for_cas.
  cas::Expr goal = cas::parse(str_arg(args, "goal"));
  return prove_json(env_, prover::prove_for_cas(env_, goal, tactic, eval_));
}

HandlerFactory make_handler_factory(std::shared_ptr<CasService> cas, std::function<std::unique_ptr<KernelService>()> kernel) {
  return [cas, kernel]() -> Handler {
    std::shared_ptr<KernelService> k = kernel ? std::shared_ptr<KernelService>(kernel()) : nullptr;
    return [cas, k](const Request& r) {
      if (r.op == "eval" || r.op == "eval_global") {
        if (!cas) return Response::failure(r.id, "WireError: this server does not evaluate CAS commands");
        return cas->handle(r);
      }
      if (r.op == "kernel_cmd") {
        if (!k) return Response::failure(r.id, "WireError: this server does not answer kernel commands");
        return k->handle(r);
      }
      return Response::failure(r.id, "WireError: unknown op " + r.op);
    };
  };
}

}  // namespace casbridge::link
