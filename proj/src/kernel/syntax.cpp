#include "casbridge/kernel/syntax.hpp"

#include <cctype>
#include <optional>

#include "casbridge/kernel/environment.hpp"

namespace casbridge::kernel {

// ---------------------------------------------------------------------------
// S-expressions

namespace {

class SReader {
 public:
  explicit SReader(std::string_view s) : src_(s) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    skip();
    while (pos_ < src_.size()) {
      out.push_back(one());
      skip();
    }
    return out;
  }

 private:
  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " at offset " + std::to_string(pos_));
  }

  static char closer(char open) { return open == '(' ? ')' : open == '{' ? '}' : ']'; }

  SExpr one() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    SExpr out;
    if (c == '(' || c == '{' || c == '[') {
      out.kind = SExpr::Kind::List;
      out.open = c;
      ++pos_;
      while (true) {
        skip();
        if (pos_ >= src_.size()) fail("unterminated list");
        if (src_[pos_] == closer(c)) {
          ++pos_;
          break;
        }
        if (src_[pos_] == ')' || src_[pos_] == '}' || src_[pos_] == ']') fail("mismatched bracket");
        out.items.push_back(one());
      }
      return out;
    }
    if (c == ')' || c == '}' || c == ']') fail("unexpected closing bracket");
    if (c == '"') {
      out.kind = SExpr::Kind::String;
      ++pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
        out.text += src_[pos_++];
      }
      if (pos_ >= src_.size()) fail("unterminated string");
      ++pos_;
      return out;
    }
    out.kind = SExpr::Kind::Atom;
    while (pos_ < src_.size()) {
      char d = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '[' ||
          d == ']' || d == '"') {
        break;
      }
      if (d == '{' && !out.text.empty() && out.text.back() == '.') {
        while (pos_ < src_.size() && src_[pos_] != '}') out.text += src_[pos_++];
        if (pos_ >= src_.size()) fail("unterminated level list");
        d = '}';
      } else if (d == '{' || d == '}') {
        break;
      }
      out.text += d;
      ++pos_;
    }
    return out;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

struct ConstRef {
  Name name;
  std::vector<Level> levels;
};

ConstRef split_levels(const std::string& atom) {
  auto p = atom.find(".{");
  if (p == std::string::npos) return {Name::parse(atom), {}};
  if (atom.back() != '}') throw SyntaxError("malformed level list in '" + atom + "'");
  ConstRef out{Name::parse(atom.substr(0, p)), {}};
  std::string inner = atom.substr(p + 2, atom.size() - p - 3);
  std::size_t start = 0;
  while (start <= inner.size()) {
    auto comma = inner.find(',', start);
    std::string tok = inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
    while (!tok.empty() && tok.back() == ' ') tok.pop_back();
    if (!tok.empty()) {
      out.levels.push_back(is_integer(tok) ? Level::of(std::stoull(tok)) : Level::named(tok));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

class SConverter {
 public:
  Expr convert(const SExpr& s) {
    switch (s.kind) {
      case SExpr::Kind::String: throw SyntaxError("unexpected string literal in term");
      case SExpr::Kind::Atom: return atom(s.text);
      case SExpr::Kind::List: return list(s);
    }
    throw SyntaxError("bad term");
  }

 private:
  Expr atom(const std::string& t) {
    if (t == "Prop") return mk_prop();
    if (t == "Type") return mk_type();
    if (t == "_") return mk_placeholder();
    if (is_integer(t)) return mk_nat(mpz_class(t));
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == t) return mk_var(scope_.size() - 1 - i);
    }
    auto ref = split_levels(t);
    return mk_const(std::move(ref.name), std::move(ref.levels));
  }

  static BinderInfo binfo_of(char open) {
    return open == '{' ? BinderInfo::Implicit : open == '[' ? BinderInfo::InstImplicit : BinderInfo::Default;
  }

  Expr binders(const SExpr& s, bool lambda) {
    if (s.items.size() < 3) throw SyntaxError("binder form needs at least one binder and a body");
    struct B {
      std::string name;
      BinderInfo bi;
      Expr type;
    };
    std::vector<B> bs;
    for (std::size_t i = 1; i + 1 < s.items.size(); ++i) {
      const auto& g = s.items[i];
      if (g.kind != SExpr::Kind::List || g.items.size() != 2 || g.items[0].kind != SExpr::Kind::Atom) {
        throw SyntaxError("binder group must be (name type)");
      }
      Expr ty = convert(g.items[1]);
      bs.push_back({g.items[0].text, binfo_of(g.open), ty});
      scope_.push_back(g.items[0].text);
    }
    Expr body = convert(s.items.back());
    for (std::size_t i = bs.size(); i-- > 0;) {
      scope_.pop_back();
      Name bn = bs[i].name == "_" ? Name("a") : Name(bs[i].name);
      body = lambda ? mk_lambda(bn, bs[i].bi, bs[i].type, body) : mk_pi(bn, bs[i].bi, bs[i].type, body);
    }
    return body;
  }

  Expr list(const SExpr& s) {
    if (s.items.empty()) throw SyntaxError("empty application");
    const auto& h = s.items[0];
    if (h.is_atom("Pi") || h.is_atom("Π")) return binders(s, false);
    if (h.is_atom("fun") || h.is_atom("λ")) return binders(s, true);
    if (h.is_atom("->") || h.is_atom("→")) {
      if (s.items.size() < 3) throw SyntaxError("-> needs at least two operands");
      Expr out = convert(s.items.back());
      for (std::size_t i = s.items.size() - 1; i-- > 1;) out = mk_arrow(convert(s.items[i]), out);
      return out;
    }
    if (h.is_atom("Sort")) {
      if (s.items.size() != 2 || s.items[1].kind != SExpr::Kind::Atom) throw SyntaxError("(Sort l)");
      const auto& l = s.items[1].text;
      return mk_sort(is_integer(l) ? Level::of(std::stoull(l)) : Level::named(l));
    }
    if (h.is_atom("let")) {
      if (s.items.size() != 3 || s.items[1].items.size() != 3) throw SyntaxError("(let (x T v) body)");
      const auto& g = s.items[1];
      Expr ty = convert(g.items[1]);
      Expr val = convert(g.items[2]);
      scope_.push_back(g.items[0].text);
      Expr body = convert(s.items[2]);
      scope_.pop_back();
      return mk_let(Name(g.items[0].text), ty, val, body);
    }
    Expr f = convert(h);
    for (std::size_t i = 1; i < s.items.size(); ++i) f = mk_app(f, convert(s.items[i]));
    return f;
  }

  std::vector<std::string> scope_;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view src) { return SReader(src).all(); }

Expr expr_of_sexpr(const SExpr& s) { return SConverter().convert(s); }

// ---------------------------------------------------------------------------
// Surface syntax

namespace {

enum class Tok { Ident, Num, Op, LParen, RParen, Comma, Colon, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

const std::vector<std::pair<std::string, std::string>>& op_spellings() {
  // longest first; second is the canonical spelling
  static const std::vector<std::pair<std::string, std::string>> ops = {
      {"<->", "↔"}, {"->", "→"}, {"/\\", "∧"}, {"\\/", "∨"}, {"!=", "≠"}, {"<=", "≤"}, {">=", "≥"},
      {"↔", "↔"},   {"→", "→"},  {"∧", "∧"},   {"∨", "∨"},   {"¬", "¬"},  {"≠", "≠"},  {"≤", "≤"},
      {"≥", "≥"},   {"λ", "λ"},  {"~", "¬"},   {"+", "+"},   {"-", "-"},  {"*", "*"},  {"/", "/"},
      {"^", "^"},   {"=", "="},  {"<", "<"},   {">", ">"},
  };
  return ops;
}

std::vector<Token> lex_surface(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Num, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < s.size()) {
        unsigned char d = static_cast<unsigned char>(s[j]);
        if (std::isalnum(d) || d == '_' || d == '\'') {
          ++j;
        } else if (d == '.' && j + 1 < s.size() && std::isalpha(static_cast<unsigned char>(s[j + 1]))) {
          ++j;
        } else {
          break;
        }
      }
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    if (c == '(') { out.push_back({Tok::LParen, "(", i++}); continue; }
    if (c == ')') { out.push_back({Tok::RParen, ")", i++}); continue; }
    if (c == ',') { out.push_back({Tok::Comma, ",", i++}); continue; }
    if (c == ':') { out.push_back({Tok::Colon, ":", i++}); continue; }
    bool matched = false;
    for (const auto& [spelling, canon] : op_spellings()) {
      if (s.substr(i, spelling.size()) == spelling) {
        out.push_back({Tok::Op, canon, i});
        i += spelling.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError("unexpected character '" + std::string(1, s[i]) + "' at " + std::to_string(i));
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class SurfaceParser {
 public:
  SurfaceParser(std::string_view src, SurfaceContext& ctx) : toks_(lex_surface(src)), ctx_(ctx) {}

  Expr parse() {
    Expr e = iff();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
  Token next() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " at " + std::to_string(peek().pos));
  }

  static Expr bin(const char* c, Expr a, Expr b) { return mk_app(mk_app(mk_const(c), std::move(a)), std::move(b)); }

  Expr iff() {
    Expr l = implies();
    if (is_op("↔")) {
      next();
      return bin("iff", l, iff());
    }
    return l;
  }

  Expr implies() {
    Expr l = disj();
    if (is_op("→")) {
      next();
      return mk_arrow(l, implies());
    }
    return l;
  }

  Expr disj() {
    Expr l = conj();
    if (is_op("∨")) {
      next();
      return bin("or", l, disj());
    }
    return l;
  }

  Expr conj() {
    Expr l = negation();
    if (is_op("∧")) {
      next();
      return bin("and", l, conj());
    }
    return l;
  }

  Expr negation() {
    if (is_op("¬")) {
      next();
      return mk_app(mk_const("not"), negation());
    }
    return comparison();
  }

  Expr comparison() {
    Expr l = additive();
    static const std::vector<std::pair<const char*, const char*>> rels = {
        {"=", "eq"}, {"≠", "ne"}, {"<", "lt"}, {"≤", "le"}, {">", "gt"}, {"≥", "ge"}};
    for (const auto& [op, c] : rels) {
      if (is_op(op)) {
        next();
        return bin(c, l, additive());
      }
    }
    return l;
  }

  Expr additive() {
    Expr l = multiplicative();
    while (is_op("+") || is_op("-")) {
      bool plus = next().text == "+";
      l = bin(plus ? "add" : "sub", l, multiplicative());
    }
    return l;
  }

  Expr multiplicative() {
    Expr l = unary();
    while (is_op("*") || is_op("/")) {
      bool mul = next().text == "*";
      l = bin(mul ? "mul" : "div", l, unary());
    }
    return l;
  }

  Expr unary() {
    if (is_op("-")) {
      next();
      return mk_app(mk_const("neg"), unary());
    }
    return power();
  }

  Expr power() {
    Expr base = application();
    if (is_op("^")) {
      next();
      return bin("pow_nat", base, unary());
    }
    return base;
  }

  bool starts_atom() const {
    auto k = peek().kind;
    if (k == Tok::Ident) return peek().text != "fun";
    return k == Tok::Num || k == Tok::LParen;
  }

  Expr application() {
    Expr f = atom();
    if (f.kind() == ExprKind::NatLit && starts_atom()) {
      return mk_app(mk_app(mk_const("mul"), f), application());
    }
    while (starts_atom()) f = mk_app(f, atom());
    return f;
  }

  Expr binder() {
    std::vector<std::string> names;
    while (peek().kind == Tok::Ident) names.push_back(next().text);
    if (names.empty()) fail("expected binder name");
    Expr ty = ctx_.default_type ? ctx_.default_type : mk_placeholder();
    if (peek().kind == Tok::Colon) {
      next();
      ty = additive();
    }
    if (peek().kind != Tok::Comma) fail("expected ','");
    next();
    for (const auto& n : names) scope_.push_back(n);
    Expr body = iff();
    for (std::size_t i = names.size(); i-- > 0;) {
      scope_.pop_back();
      body = mk_lambda(Name(names[i]), BinderInfo::Default, lift_loose(ty, i), body);
    }
    return body;
  }

  Expr atom() {
    const Token& t = peek();
    if (t.kind == Tok::Num) {
      next();
      return mk_nat(mpz_class(t.text));
    }
    if (t.kind == Tok::LParen) {
      next();
      Expr e = iff();
      if (peek().kind != Tok::RParen) fail("expected ')'");
      next();
      return e;
    }
    if (t.kind == Tok::Op && t.text == "λ") {
      next();
      return binder();
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "fun") {
        next();
        return binder();
      }
      next();
      return ident(t.text);
    }
    fail("unexpected '" + t.text + "'");
  }

  Expr ident(const std::string& id) {
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == id) return mk_var(scope_.size() - 1 - i);
    }
    if (id == "_") return mk_placeholder();
    if (ctx_.env && Name::valid_component(id.substr(0, id.find('.'))) && ctx_.env->contains(Name::parse(id))) {
      return mk_const(Name::parse(id));
    }
    if (id.find('.') != std::string::npos) throw ElaborationFailure("unknown constant '" + id + "'");
    auto it = ctx_.locals.find(id);
    if (it != ctx_.locals.end()) return it->second;
    Expr ty = ctx_.default_type;
    if (auto vt = ctx_.var_types.find(id); vt != ctx_.var_types.end()) ty = vt->second;
    if (!ty) throw ElaborationFailure("unknown identifier '" + id + "'");
    Expr local = mk_local(fresh_unique_name(), Name(id), BinderInfo::Default, ty);
    ctx_.locals.emplace(id, local);
    return local;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SurfaceContext& ctx_;
  std::vector<std::string> scope_;
};

}  // namespace

Expr parse_surface(std::string_view src, SurfaceContext& ctx) { return SurfaceParser(src, ctx).parse(); }

}  // namespace casbridge::kernel
