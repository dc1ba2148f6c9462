#include "casbridge/kernel/environment.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "casbridge/kernel/syntax.hpp"

#ifndef CASBRIDGE_DATA_DIR
#define CASBRIDGE_DATA_DIR "data"
#endif

namespace casbridge::kernel {

std::string to_string(DeclKind k) {
  switch (k) {
    case DeclKind::Axiom: return "axiom";
    case DeclKind::Definition: return "definition";
    case DeclKind::Theorem: return "theorem";
    case DeclKind::TrustedAxiom: return "trusted axiom";
  }
  return "axiom";
}

struct Environment::State {
  std::map<Name, Declaration> decls;
  std::vector<Name> order;
  std::map<std::pair<Name, Name>, Name> instances;
};

Environment::Environment() : state_(std::make_shared<State>()) {}

Environment Environment::add(Declaration d) const {
  if (d.name.empty()) throw DuplicateName("declaration without a name");
  if (state_->decls.count(d.name)) throw DuplicateName(d.name.str());
  bool needs_value = d.kind == DeclKind::Definition || d.kind == DeclKind::Theorem;
  if (needs_value != d.value.has_value()) {
    throw TypeError(d.name.str() + ": " + to_string(d.kind) +
                    (needs_value ? " requires a value" : " must not have a value"));
  }
  auto next = std::make_shared<State>(*state_);
  // `C T` with both constants and C a `has_*` class registers an instance.
  if (d.type && d.type.is_app() && d.type.fn().is_const() && d.type.arg().is_const()) {
    const auto& cls = d.type.fn().name();
    if (cls.components().size() == 1 && cls.components()[0].rfind("has_", 0) == 0) {
      next->instances.emplace(std::make_pair(cls, d.type.arg().name()), d.name);
    }
  }
  next->order.push_back(d.name);
  next->decls.emplace(d.name, std::move(d));
  Environment out;
  out.state_ = std::move(next);
  return out;
}

const Declaration* Environment::find(const Name& n) const {
  auto it = state_->decls.find(n);
  return it == state_->decls.end() ? nullptr : &it->second;
}

const Declaration& Environment::get(const Name& n) const {
  if (const auto* d = find(n)) return *d;
  throw UnknownDeclaration(n.str());
}

std::size_t Environment::size() const { return state_->order.size(); }

std::vector<const Declaration*> Environment::declarations() const {
  std::vector<const Declaration*> out;
  out.reserve(state_->order.size());
  for (const auto& n : state_->order) out.push_back(&state_->decls.at(n));
  return out;
}

std::vector<const Declaration*> Environment::trusted_axioms() const {
  std::vector<const Declaration*> out;
  for (const auto* d : declarations()) {
    if (d->kind == DeclKind::TrustedAxiom) out.push_back(d);
  }
  return out;
}

std::optional<Name> Environment::find_instance(const Name& cls, const Name& type) const {
  auto it = state_->instances.find({cls, type});
  if (it == state_->instances.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Declaration files

Environment load_declarations(Environment env, std::istream& in, const std::string& origin) {
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<SExpr> items;
  try {
    items = read_sexprs(buf.str());
  } catch (const Error& e) {
    throw SyntaxError(origin + ": " + e.detail());
  }
  for (const auto& item : items) {
    if (item.kind != SExpr::Kind::List || item.items.size() < 3 || item.items[0].kind != SExpr::Kind::Atom ||
        item.items[1].kind != SExpr::Kind::Atom) {
      throw SyntaxError(origin + ": expected (kind name type ...)");
    }
    const auto& kw = item.items[0].text;
    Declaration d;
    if (kw == "axiom") {
      d.kind = DeclKind::Axiom;
    } else if (kw == "def") {
      d.kind = DeclKind::Definition;
    } else if (kw == "theorem") {
      d.kind = DeclKind::Theorem;
    } else {
      throw SyntaxError(origin + ": unknown declaration kind '" + kw + "'");
    }
    std::string name = item.items[1].text;
    if (auto p = name.find(".{"); p != std::string::npos) {
      std::string params = name.substr(p + 2, name.size() - p - 3);
      std::stringstream ps(params);
      std::string tok;
      while (std::getline(ps, tok, ',')) {
        if (!tok.empty()) d.univ_params.push_back(tok);
      }
      name = name.substr(0, p);
    }
    d.name = Name::parse(name);
    std::size_t i = 2;
    d.type = expr_of_sexpr(item.items[i++]);
    if (d.kind != DeclKind::Axiom) {
      if (i >= item.items.size()) throw SyntaxError(origin + ": " + name + " needs a value");
      d.value = expr_of_sexpr(item.items[i++]);
    }
    if (i < item.items.size()) {
      if (item.items[i].kind != SExpr::Kind::String) throw SyntaxError(origin + ": doc must be a string");
      d.doc = item.items[i++].text;
    }
    if (i != item.items.size()) throw SyntaxError(origin + ": trailing items in " + name);
    env = env.add(std::move(d));
  }
  return env;
}

Environment load_declarations_file(Environment env, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UnknownDeclaration("cannot open declaration file " + path.string());
  return load_declarations(std::move(env), in, path.string());
}

std::filesystem::path default_prelude_path() {
  if (const char* p = std::getenv("CASBRIDGE_PRELUDE")) return p;
  return std::filesystem::path(CASBRIDGE_DATA_DIR) / "prelude.decl";
}

const Environment& prelude() {
  static const Environment env = load_declarations_file(Environment(), default_prelude_path());
  return env;
}

}  // namespace casbridge::kernel
