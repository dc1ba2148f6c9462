#include "casbridge/cli/session.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/cas/number.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/cas/wire.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/syntax.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/tactics/cas_eval.hpp"

namespace casbridge::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool starts_with_word(std::string_view s, std::string_view w) {
  return s.substr(0, w.size()) == w && (s.size() == w.size() || std::isspace(static_cast<unsigned char>(s[w.size()])) ||
                                         s[w.size()] == '(');
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<std::string> parse_params(std::string_view rest, std::size_t line) {
  std::string p = trim(rest);
  if (p.empty()) return {};
  if (p.front() != '(' || p.back() != ')') {
    throw SyntaxError("line " + std::to_string(line) + ": expected (unfolding name ...) after begin_mm_block");
  }
  auto ws = words(std::string_view(p).substr(1, p.size() - 2));
  if (ws.empty() || ws[0] != "unfolding") {
    throw SyntaxError("line " + std::to_string(line) + ": unknown block parameter");
  }
  return {ws.begin() + 1, ws.end()};
}

// Positions of the unescaped double quotes of s.
std::vector<std::size_t> quote_positions(std::string_view s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '"') {
      ++i;
    } else if (s[i] == '"') {
      out.push_back(i);
    }
  }
  return out;
}

void reject_applied_free(const kernel::Expr& e, const kernel::SurfaceContext& sctx) {
  using kernel::ExprKind;
  switch (e.kind()) {
    case ExprKind::App: {
      kernel::Expr f = kernel::app_fn(e);
      if (f.kind() == ExprKind::Local) {
        for (const auto& [name, l] : sctx.locals) {
          if (kernel::alpha_equal(l, f)) throw ElaborationFailure("unknown identifier '" + name + "'");
        }
      }
      reject_applied_free(e.fn(), sctx);
      reject_applied_free(e.arg(), sctx);
      return;
    }
    case ExprKind::Lam:
    case ExprKind::Pi:
      reject_applied_free(e.type(), sctx);
      reject_applied_free(e.body(), sctx);
      return;
    default:
      return;
  }
}

// Free identifiers reach the CAS as plain symbols of the same name.
cas::Expr free_locals_to_symbols(const cas::Expr& e, const kernel::SurfaceContext& sctx) {
  if (!e.is_app()) return e;
  if (e.is_app("LeanLocal") && e.args().size() >= 2 && e.arg(1).is_str()) {
    auto it = sctx.locals.find(e.arg(1).str());
    if (it != sctx.locals.end() && e.arg(0).is_str() && e.arg(0).str() == it->second.name().str()) {
      return cas::sym(it->first);
    }
  }
  std::vector<cas::Expr> args;
  for (const auto& a : e.args()) args.push_back(free_locals_to_symbols(a, sctx));
  return cas::app(free_locals_to_symbols(e.head(), sctx), std::move(args));
}

std::string splice(std::string_view seg, kernel::SurfaceContext& sctx, const std::vector<std::string>& unfolding) {
  kernel::Expr pre = kernel::parse_surface(seg, sctx);
  reject_applied_free(pre, sctx);
  kernel::Expr e = kernel::elaborate(*sctx.env, pre);
  if (!unfolding.empty()) {
    std::vector<kernel::Name> names;
    for (const auto& n : unfolding) {
      if (!sctx.env->find(kernel::Name(n))) throw UnknownDeclaration(n);
      names.emplace_back(n);
    }
    e = kernel::beta_normalize(kernel::unfold_definitions(*sctx.env, e, names));
  }
  return "Activate[LeanConvert[" + cas::render(free_locals_to_symbols(bridge::reflect(e), sctx)) + "]]";
}

// Antiquotes are the odd-numbered segments between unescaped quotes.
std::string expand_segments(std::string_view s, const kernel::Environment& env, const std::vector<std::string>& unfolding) {
  auto qs = quote_positions(s);
  if (qs.size() % 2 != 0) throw SyntaxError("unterminated antiquotation");
  kernel::SurfaceContext sctx{&env, {}, kernel::mk_const("real"), {}};
  std::string out;
  std::size_t pos = 0;
  auto copy_plain = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      if (s[i] == '\\' && i + 1 < to && s[i + 1] == '"') {
        out += '"';
        ++i;
      } else {
        out += s[i];
      }
    }
  };
  for (std::size_t k = 0; k < qs.size(); k += 2) {
    copy_plain(pos, qs[k]);
    std::string_view seg = s.substr(qs[k] + 1, qs[k + 1] - qs[k] - 1);
    out += splice(seg, sctx, unfolding);
    pos = qs[k + 1] + 1;
  }
  copy_plain(pos, s.size());
  return out;
}

}  // namespace

// ---- mm-blocks ------------------------------------------------------------

MmCommand parse_command(std::string_view src) {
  MmCommand c;
  std::string s = trim(src);
  if (starts_with_word(s, "as")) {
    std::string rest = trim(std::string_view(s).substr(2));
    if (starts_with_word(rest, "image")) {
      c.image = true;
      s = trim(std::string_view(rest).substr(5));
    }
  }
  c.source = s;
  return c;
}

std::vector<MmBlock> parse_mm_blocks(std::string_view text) {
  std::vector<MmBlock> out;
  std::optional<MmBlock> cur;
  std::string pending;
  std::size_t pending_line = 0;
  auto flush = [&] {
    std::string t = trim(pending);
    if (!t.empty()) {
      MmCommand c = parse_command(t);
      c.line = pending_line;
      cur->commands.push_back(std::move(c));
    }
    pending.clear();
  };
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    std::string t = trim(line);
    if (starts_with_word(t, "begin_mm_block")) {
      if (cur) throw SyntaxError("line " + std::to_string(lineno) + ": nested begin_mm_block");
      cur = MmBlock{parse_params(std::string_view(t).substr(14), lineno), {}, lineno};
      continue;
    }
    if (!cur) {
      if (t == "end_mm_block") throw SyntaxError("line " + std::to_string(lineno) + ": end_mm_block without begin_mm_block");
      continue;
    }
    if (t == "end_mm_block") {
      flush();
      out.push_back(std::move(*cur));
      cur.reset();
      continue;
    }
    if (t.empty()) {
      flush();
      continue;
    }
    if (trim(pending).empty()) pending_line = lineno;
    if (t.back() == ';') {
      pending += t.substr(0, t.size() - 1);
      flush();
    } else {
      pending += t + "\n";
    }
  }
  if (cur) throw SyntaxError("line " + std::to_string(cur->line) + ": begin_mm_block without end_mm_block");
  return out;
}

// ---- antiquotation --------------------------------------------------------

std::string expand_antiquotes(std::string_view src, const kernel::Environment& env,
                              const std::vector<std::string>& unfolding) {
  std::string s = trim(src);
  auto qs = quote_positions(s);
  bool wrapped = qs.size() >= 2 && qs.front() == 0 && qs.back() == s.size() - 1 && qs.size() % 2 == 0;
  if (wrapped) {
    // Block-level quotes around the whole command; fall back to reading
    // them as antiquote delimiters when the inner reading does not parse.
    std::string_view inner = std::string_view(s).substr(1, s.size() - 2);
    try {
      return expand_segments(inner, env, unfolding);
    } catch (const ParseError&) {
      if (qs.size() == 2) throw;
    } catch (const SyntaxError&) {
      if (qs.size() == 2) throw;
    }
  }
  return expand_segments(s, env, unfolding);
}

// ---- cell results -----------------------------------------------------------

json CellResult::to_json() const {
  json j{{"ok", ok}, {"output", output}, {"display", display}};
  if (image_svg) j["image_svg"] = *image_svg;
  if (explode) j["explode"] = *explode;
  if (result) j["result"] = *result;
  return j;
}

namespace {

CellResult failed(std::string msg) {
  CellResult r;
  r.ok = false;
  r.output = std::move(msg);
  return r;
}

std::string address_text(const std::optional<link::Address>& a) {
  return a ? a->host + ":" + std::to_string(a->port) : "in-process";
}

}  // namespace

// ---- sessions ---------------------------------------------------------------

class Session::BlockContext {
 public:
  BlockContext(std::shared_ptr<link::Link> link, std::shared_ptr<cas::GlobalContext> global) : link_(std::move(link)) {
    if (!link_) ctx_.emplace(std::move(global), cas::Context::Scope::Local);
  }

  link::Response evaluate(const std::string& src) {
    if (link_) return link_->request("eval", src);
    return link::CasService::evaluate(*ctx_, ++id_, src);
  }

 private:
  std::shared_ptr<link::Link> link_;
  std::optional<cas::Context> ctx_;
  std::uint64_t id_ = 0;
};

Session::Session(SessionOptions opts) : opts_(std::move(opts)), env_(opts_.env), reg_(bridge::make_prelude_registry(env_)) {
  if (opts_.bridge_rules) reg_ = bridge::load_sym_rules(reg_, *opts_.bridge_rules);
  if (opts_.cas) {
    if (opts_.cas_rules) throw SyntaxError("--cas-rules applies to the in-process engine; pass it to serve-cas instead");
    cas_link_ = link::Link::connect(*opts_.cas);
  } else {
    global_ = cas::make_default_global();
    if (opts_.cas_rules) {
      cas::Context g(global_, cas::Context::Scope::Global);
      cas::load_rule_file(g, *opts_.cas_rules);
    }
  }
  if (opts_.kernel) {
    kernel_link_ = link::Link::connect(*opts_.kernel);
  } else {
    tactics::CasEval eval = cas_link_ ? link::remote_cas(cas_link_) : tactics::local_cas(global_);
    kernel_ = std::make_unique<link::KernelService>(env_, eval);
  }
}

CellResult Session::present(const link::Response& r) const {
  if (!r.ok) {
    CellResult out = failed("eval: " + r.error.value_or("unknown error"));
    if (!r.result.is_null()) out.result = r.result;
    return out;
  }
  CellResult out;
  out.ok = true;
  out.result = r.result;
  if (r.display == "image") {
    out.display = "image";
    out.image_svg = r.image_svg;
    out.output = "[image]";
    return out;
  }
  cas::Expr v = cas::from_wire(r.result);
  try {
    bridge::OpenTerm t = bridge::elaborate_open(reg_, v, kernel::mk_const("real"));
    out.output = kernel::pretty(env_, t.term);
  } catch (const Error&) {
    out.output = cas::render(v);
  }
  return out;
}

CellResult Session::run_in(BlockContext& ctx, const MmCommand& cmd, const std::vector<std::string>& unfolding) {
  std::string expanded;
  try {
    expanded = expand_antiquotes(cmd.source, env_, unfolding);
  } catch (const Error& e) {
    return failed(std::string("antiquote: ") + e.what());
  }
  if (cmd.image) expanded = "as image " + expanded;
  try {
    return present(ctx.evaluate(expanded));
  } catch (const Error& e) {
    return failed(std::string("link: ") + e.what());
  }
}

std::vector<CellResult> Session::run_block(const MmBlock& block, const std::optional<std::filesystem::path>& source_file,
                                           std::size_t block_index) {
  BlockContext ctx(cas_link_, global_);
  std::vector<CellResult> out;
  for (std::size_t i = 0; i < block.commands.size(); ++i) {
    const MmCommand& cmd = block.commands[i];
    CellResult r = run_in(ctx, cmd, block.unfolding);
    if (r.ok && r.image_svg && source_file) {
      std::filesystem::path p = source_file->parent_path() / (source_file->stem().string() + "-" +
                                                              std::to_string(block_index + 1) + "-" +
                                                              std::to_string(i + 1) + ".svg");
      std::ofstream f(p);
      f << *r.image_svg;
      if (!f) {
        r = failed("image: cannot write " + p.string());
      } else {
        r.output = p.string();
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

CellResult Session::run_command(const std::string& src) {
  MmBlock b;
  b.commands.push_back(parse_command(src));
  return run_block(b).at(0);
}

json Session::kernel_cmd(const std::string& cmd, const json& args) {
  json payload{{"cmd", cmd}, {"args", args}};
  link::Response r = kernel_link_ ? kernel_link_->request("kernel_cmd", payload)
                                  : kernel_->handle(link::Request{0, "kernel_cmd", payload});
  if (!r.ok) throw RemoteError(r.error.value_or("unknown error"));
  return r.result;
}

CellResult Session::run_kernel(const std::string& src) {
  std::string s = trim(src);
  std::size_t sp = s.find_first_of(" \t\n");
  std::string verb = s.substr(0, sp);
  std::string rest = sp == std::string::npos ? "" : trim(std::string_view(s).substr(sp));
  try {
    auto [cmd, args] = kernel_request(verb, rest);
    json result = kernel_cmd(cmd, args);
    CellResult out;
    out.ok = true;
    out.output = format_kernel_result(cmd, args, result);
    if (result.contains("explode")) {
      out.explode = result["explode"];
      out.display = "explode";
    }
    return out;
  } catch (const RemoteError& e) {
    return failed("kernel: " + e.detail());
  } catch (const Error& e) {
    return failed(std::string("kernel: ") + e.what());
  }
}

CellResult Session::run_cell(const std::string& source, const std::string& mode) {
  CellResult r;
  if (mode == "cas") {
    r = run_command(source);
  } else if (mode == "cas-image") {
    MmBlock b;
    MmCommand c = parse_command(source);
    c.image = true;
    b.commands.push_back(c);
    r = run_block(b).at(0);
  } else if (mode == "kernel") {
    r = run_kernel(source);
  } else {
    r = failed("cell: unknown mode '" + mode + "'");
  }
  json entry = r.to_json();
  entry["index"] = history_.size();
  entry["source"] = source;
  entry["mode"] = mode;
  history_.push_back(std::move(entry));
  return r;
}

json Session::state() const {
  return {{"cells", history_}, {"cas", address_text(opts_.cas)}, {"kernel", address_text(opts_.kernel)}};
}

// ---- kernel queries -------------------------------------------------------

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '[' || c == '(' || c == '{') ++depth;
    if (c == ']' || c == ')' || c == '}') --depth;
    if (c == ';' && depth == 0) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

json matrix_arg(const std::string& src) {
  cas::Context ctx;
  cas::Expr m = ctx.evaluate(cas::parse(src));
  auto bad = [&] { return SyntaxError("expected a matrix {{a, b}, {c, d}} of rationals, got " + cas::render(m)); };
  if (!m.is_app("List")) throw bad();
  json rows = json::array();
  for (const auto& row : m.args()) {
    if (!row.is_app("List")) throw bad();
    json r = json::array();
    for (const auto& x : row.args()) {
      auto q = cas::as_rational(x);
      if (!q) throw bad();
      r.push_back(q->get_str());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::pair<std::string, std::string> split_first(const std::string& s) {
  std::size_t sp = s.find_first_of(" \t\n");
  if (sp == std::string::npos) return {s, ""};
  return {s.substr(0, sp), trim(std::string_view(s).substr(sp))};
}

std::string render_rows(const json& rows) {
  std::ostringstream out;
  for (const auto& s : rows) {
    out << s["index"].get<std::size_t>() << "│" << std::string(2 * s["depth"].get<std::size_t>(), ' ')
        << s["goal"].get<std::string>() << "  " << s["rule"].get<std::string>();
    if (s.contains("hyp") && s["rule"] == "assumption") out << " " << s["hyp"].get<std::string>();
    if (!s["args"].empty()) {
      out << " [";
      for (std::size_t k = 0; k < s["args"].size(); ++k) out << (k ? ", " : "") << s["args"][k].get<std::size_t>();
      out << "]";
    }
    out << "\n";
  }
  return out.str();
}

std::string matrix_text(const json& m) {
  std::string out = "{";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i ? ", {" : "{";
    for (std::size_t j = 0; j < m[i].size(); ++j) out += (j ? ", " : "") + m[i][j].get<std::string>();
    out += "}";
  }
  return out + "}";
}

std::string verified_text(const json& v) {
  return "verified (" + v["method"].get<std::string>() + (v["trusted"].get<bool>() ? ", trusted" : "") + ")";
}

}  // namespace

std::pair<std::string, json> kernel_request(const std::string& verb, const std::string& rest) {
  auto need = [&](bool ok, const char* usage) {
    if (!ok) throw SyntaxError(std::string("usage: ") + usage);
  };
  if (verb == "info") {
    need(!rest.empty() && words(rest).size() == 1, "info <declaration>");
    return {"get_decl_info", {{"name", rest}}};
  }
  if (verb == "explode") {
    need(!rest.empty() && words(rest).size() == 1, "explode <declaration>");
    return {"explode", {{"name", rest}}};
  }
  if (verb == "prove") {
    auto [tactic, formula] = split_first(rest);
    need(!tactic.empty() && !formula.empty(), "prove <tactic> <formula>");
    return {"prove", {{"tactic", tactic}, {"formula", formula}}};
  }
  if (verb == "factor") {
    need(!rest.empty(), "factor <expression>");
    return {"run_tactic", {{"tactic", "factor"}, {"expr", rest}}};
  }
  if (verb == "linarith") {
    auto hyps = split_list(rest);
    need(!hyps.empty(), "linarith <hyp>; <hyp>; ...");
    return {"run_tactic", {{"tactic", "linarith"}, {"hyps", hyps}}};
  }
  if (verb == "lu") {
    need(!rest.empty(), "lu <matrix>");
    return {"run_tactic", {{"tactic", "lu"}, {"matrix", matrix_arg(rest)}}};
  }
  if (verb == "solve") {
    need(!rest.empty(), "solve <system>");
    return {"run_tactic", {{"tactic", "solve"}, {"goal", rest}}};
  }
  if (verb == "plausible") {
    std::size_t bar = rest.find("|-");
    std::size_t len = 2;
    if (bar == std::string::npos) {
      bar = rest.find("⊢");
      len = std::string("⊢").size();
    }
    need(bar != std::string::npos, "plausible <hyp>; ... |- <goal>");
    std::string goal = trim(std::string_view(rest).substr(bar + len));
    need(!goal.empty(), "plausible <hyp>; ... |- <goal>");
    return {"run_tactic", {{"tactic", "plausible"}, {"hyps", split_list(rest.substr(0, bar))}, {"goal", goal}}};
  }
  if (verb == "axiomatize") {
    auto [name, stmt] = split_first(rest);
    need(!name.empty() && !stmt.empty(), "axiomatize <name> <statement>");
    return {"axiomatize", {{"name", name}, {"statement", stmt}, {"source", "cli"}}};
  }
  if (verb == "approx") {
    auto [name, expr] = split_first(rest);
    need(!name.empty() && !expr.empty(), "approx <name> <expression>");
    return {"run_tactic", {{"tactic", "approx"}, {"name", name}, {"expr", expr}}};
  }
  throw SyntaxError("unknown kernel command '" + verb + "'");
}

std::vector<std::string> primitive_certificate(const std::vector<std::string>& coeffs) {
  std::vector<mpq_class> qs;
  mpz_class den = 1, num = 0;
  for (const auto& c : coeffs) {
    mpq_class q(c);
    q.canonicalize();
    qs.push_back(q);
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  }
  for (const auto& q : qs) {
    mpz_class n = q.get_num() * (den / q.get_den());
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), n.get_mpz_t());
  }
  std::vector<std::string> out;
  for (const auto& q : qs) {
    mpz_class n = q.get_num() * (den / q.get_den());
    out.push_back(num == 0 ? n.get_str() : mpz_class(n / num).get_str());
  }
  return out;
}

std::string format_kernel_result(const std::string& cmd, const json& args, const json& result) {
  if (cmd == "get_decl_info") {
    std::string out = result["kind"].get<std::string>() + " " + result["name"].get<std::string>() + " : " +
                      result["type"].get<std::string>();
    if (result.contains("doc")) out += "\n" + result["doc"].get<std::string>();
    return out;
  }
  if (cmd == "explode") return result["statement"].get<std::string>() + "\n" + result["text"].get<std::string>();
  if (cmd == "axiomatize") {
    return result["kind"].get<std::string>() + " " + result["name"].get<std::string>() + " : " +
           result["statement"].get<std::string>();
  }
  std::string tactic = args.value("tactic", std::string());
  if (cmd == "run_tactic" && tactic == "factor") {
    return result["factored"].get<std::string>() + "\n" + verified_text(result["verified"]);
  }
  if (cmd == "run_tactic" && tactic == "linarith") {
    std::string cert;
    for (const auto& c : primitive_certificate(result["certificate"].get<std::vector<std::string>>())) {
      cert += (cert.empty() ? "" : ",") + c;
    }
    return "false (certificate " + cert + " checked)";
  }
  if (cmd == "run_tactic" && tactic == "lu") {
    return "L = " + matrix_text(result["L"]) + "\nU = " + matrix_text(result["U"]) + "\n" +
           verified_text(result["verified"]);
  }
  if (cmd == "run_tactic" && tactic == "solve") {
    std::string w;
    for (const auto& x : result["witnesses"]) w += (w.empty() ? "" : ", ") + x.get<std::string>();
    return "witnesses: " + w + "\n" + verified_text(result["verified"]);
  }
  if (cmd == "run_tactic" && tactic == "plausible") {
    std::string out = result["status"].get<std::string>();
    std::string cm;
    for (const auto& [k, v] : result["countermodel"].items()) cm += (cm.empty() ? "" : ", ") + k + " = " + v.get<std::string>();
    if (!cm.empty()) out += ": " + cm;
    if (!result["reason"].get<std::string>().empty()) out += " (" + result["reason"].get<std::string>() + ")";
    return out;
  }
  if (cmd == "run_tactic" && tactic == "approx") {
    return "trusted axiom " + result["name"].get<std::string>() + " : " + result["statement"].get<std::string>();
  }
  // prove-shaped results
  return result["status"].get<std::string>() + ": " + result["statement"].get<std::string>() + "\n" +
         render_rows(result["explode"]);
}

}  // namespace casbridge::cli
