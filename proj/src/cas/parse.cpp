#include "casbridge/cas/parse.hpp"

#include <cctype>
#include <charconv>

#include "casbridge/error.hpp"

namespace casbridge::cas {

namespace {

struct Token {
  enum Kind { End, Num, Str, Ident, Op } kind = End;
  std::string text;
  bool is_real = false;
  std::size_t pos = 0;
  std::size_t end = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '$'; }

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      Token t;
      t.pos = i_;
      if (i_ >= s_.size()) {
        t.end = i_;
        out.push_back(t);
        return out;
      }
      char c = s_[i_];
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
        number(t);
      } else if (c == '"') {
        string(t);
      } else if (ident_start(c) || c == '_') {
        ident(t);
      } else {
        op(t);
      }
      t.end = i_;
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("column " + std::to_string(i_ + 1) + ": " + msg); }

  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_.substr(i_, 2) == "(*") {
        auto close = s_.find("*)", i_ + 2);
        if (close == std::string_view::npos) fail("unterminated comment");
        i_ = close + 2;
      } else {
        return;
      }
    }
  }

  bool digit_at(std::size_t k) const { return k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k])); }

  void number(Token& t) {
    t.kind = Token::Num;
    std::size_t start = i_;
    while (digit_at(i_)) ++i_;
    if (i_ < s_.size() && s_[i_] == '.' && !(i_ + 1 < s_.size() && s_[i_ + 1] == '.')) {
      t.is_real = true;
      ++i_;
      while (digit_at(i_)) ++i_;
      if (i_ < s_.size() && s_[i_] == 'e') {
        std::size_t k = i_ + 1;
        if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
        if (digit_at(k)) {
          i_ = k;
          while (digit_at(i_)) ++i_;
        }
      }
    }
    t.text = std::string(s_.substr(start, i_ - start));
  }

  void string(Token& t) {
    t.kind = Token::Str;
    ++i_;
    while (true) {
      if (i_ >= s_.size()) fail("unterminated string");
      char c = s_[i_++];
      if (c == '"') return;
      if (c == '\\') {
        if (i_ >= s_.size()) fail("unterminated string");
        char e = s_[i_++];
        switch (e) {
          case 'n': t.text += '\n'; break;
          case 't': t.text += '\t'; break;
          case 'r': t.text += '\r'; break;
          default: t.text += e;
        }
      } else {
        t.text += c;
      }
    }
  }

  void ident(Token& t) {
    t.kind = Token::Ident;
    std::size_t start = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    if (i_ < s_.size() && s_[i_] == '_') {
      ++i_;
      if (i_ < s_.size() && ident_start(s_[i_])) {
        while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
      }
    }
    t.text = std::string(s_.substr(start, i_ - start));
  }

  void op(Token& t) {
    static const char* two[] = {":=", "==", "!=", "<=", ">=", "->", "//", "&&", "||"};
    t.kind = Token::Op;
    for (const char* o : two) {
      if (s_.substr(i_, 2) == o) {
        t.text = o;
        i_ += 2;
        return;
      }
    }
    static const std::string_view one = "=<>!+-*/^;,[]{}()";
    if (one.find(s_[i_]) == std::string_view::npos) fail(std::string("unexpected character '") + s_[i_] + "'");
    t.text = std::string(1, s_[i_++]);
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

bool is_number(const Expr& e) { return e.is_int() || e.is_real(); }

Expr negate_number(const Expr& e) {
  if (e.is_int()) return integer(-e.integer());
  return real(-e.real());
}

/// -b as produced by binary minus: negate literal coefficients in place.
Expr negate(const Expr& b) {
  if (is_number(b)) return negate_number(b);
  if (b.is_app("Times") && b.arity() >= 2 && is_number(b.arg(0))) {
    auto args = b.args();
    args[0] = negate_number(args[0]);
    return app("Times", std::move(args));
  }
  return app("Times", {integer(-1), b});
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  Expr top() {
    Expr e = compound();
    if (peek().kind != Token::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  bool at_op(std::string_view o, std::size_t k = 0) const { return peek(k).kind == Token::Op && peek(k).text == o; }
  Token next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("column " + std::to_string(peek().pos + 1) + ": " + msg);
  }
  void expect(std::string_view o) {
    if (!at_op(o)) fail("expected '" + std::string(o) + "'" + (peek().kind == Token::End ? " before end of input" : ""));
    ++p_;
  }

  Expr compound() {
    std::vector<Expr> items{assignment()};
    bool any = false;
    while (at_op(";")) {
      any = true;
      ++p_;
      if (peek().kind == Token::End || at_op(")") || at_op("]") || at_op(",") || at_op("}")) {
        items.push_back(sym("Null"));
        break;
      }
      items.push_back(assignment());
    }
    return any ? app("CompoundExpression", std::move(items)) : items[0];
  }

  Expr assignment() {
    Expr lhs = postfix();
    if (at_op("=")) {
      ++p_;
      return app("Set", {lhs, assignment()});
    }
    if (at_op(":=")) {
      ++p_;
      return app("SetDelayed", {lhs, assignment()});
    }
    return lhs;
  }

  Expr postfix() {
    Expr e = rule();
    while (at_op("//")) {
      ++p_;
      Expr f = rule();
      e = app(f, {e});
    }
    return e;
  }

  Expr rule() {
    Expr lhs = disj();
    if (at_op("->")) {
      ++p_;
      return app("Rule", {lhs, rule()});
    }
    return lhs;
  }

  Expr disj() {
    std::vector<Expr> items{conj()};
    while (at_op("||")) {
      ++p_;
      items.push_back(conj());
    }
    return items.size() == 1 ? items[0] : app("Or", std::move(items));
  }

  Expr conj() {
    std::vector<Expr> items{negation()};
    while (at_op("&&")) {
      ++p_;
      items.push_back(negation());
    }
    return items.size() == 1 ? items[0] : app("And", std::move(items));
  }

  Expr negation() {
    if (at_op("!")) {
      ++p_;
      return app("Not", {negation()});
    }
    return comparison();
  }

  static const char* relation_head(const Token& t) {
    if (t.kind != Token::Op) return nullptr;
    if (t.text == "==") return "Equal";
    if (t.text == "!=") return "Unequal";
    if (t.text == "<") return "Less";
    if (t.text == "<=") return "LessEqual";
    if (t.text == ">") return "Greater";
    if (t.text == ">=") return "GreaterEqual";
    return nullptr;
  }

  Expr comparison() {
    Expr first = additive();
    const char* head = relation_head(peek());
    if (!head) return first;
    std::vector<Expr> items{first};
    while (const char* h = relation_head(peek())) {
      if (std::string_view(h) != head) fail("mixed comparison chain");
      ++p_;
      items.push_back(additive());
    }
    return app(head, std::move(items));
  }

  Expr additive() {
    std::vector<Expr> items{multiplicative()};
    while (at_op("+") || at_op("-")) {
      bool minus = next().text == "-";
      Expr rhs = multiplicative();
      items.push_back(minus ? negate(rhs) : rhs);
    }
    return items.size() == 1 ? items[0] : app("Plus", std::move(items));
  }

  bool starts_primary() const {
    const Token& t = peek();
    return t.kind == Token::Num || t.kind == Token::Ident || at_op("(") || at_op("{");
  }

  Expr multiplicative() {
    std::vector<Expr> items{unary()};
    while (true) {
      if (at_op("*")) {
        ++p_;
        items.push_back(unary());
      } else if (at_op("/")) {
        ++p_;
        items.push_back(app("Power", {unary(), integer(-1)}));
      } else if (starts_primary()) {
        items.push_back(unary());
      } else {
        break;
      }
    }
    return items.size() == 1 ? items[0] : app("Times", std::move(items));
  }

  Expr unary() {
    if (at_op("-")) {
      ++p_;
      if (peek().kind == Token::Num && !at_op("^", 1)) return application(negate_number(number(next())));
      Expr operand = unary();
      return app("Times", {integer(-1), operand});
    }
    if (at_op("+")) {
      ++p_;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = application();
    if (at_op("^")) {
      ++p_;
      return app("Power", {base, unary()});
    }
    return base;
  }

  Expr application() { return application(primary()); }

  Expr application(Expr e) {
    while (at_op("[")) {
      if (at_op("[", 1) && peek(1).pos == peek().pos + 1) {
        p_ += 2;
        std::vector<Expr> idx = sequence("]");
        if (!(at_op("]") && at_op("]", 1))) fail("expected ']]'");
        p_ += 2;
        idx.insert(idx.begin(), e);
        e = app("Part", std::move(idx));
        continue;
      }
      ++p_;
      std::vector<Expr> args = sequence("]");
      expect("]");
      e = app(e, std::move(args));
    }
    return e;
  }

  std::vector<Expr> sequence(std::string_view close) {
    std::vector<Expr> out;
    if (at_op(close)) return out;
    out.push_back(compound());
    while (at_op(",")) {
      ++p_;
      out.push_back(compound());
    }
    return out;
  }

  Expr number(const Token& t) {
    if (!t.is_real) return integer(mpz_class(t.text));
    double v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc()) throw ParseError("column " + std::to_string(t.pos + 1) + ": bad real literal");
    return real(v);
  }

  static Expr ident(const std::string& text) {
    auto u = text.find('_');
    if (u == std::string::npos) return sym(text);
    std::string head = text.substr(u + 1);
    Expr blank = head.empty() ? app("Blank", {}) : app("Blank", {sym(head)});
    if (u == 0) return blank;
    return app("Pattern", {sym(text.substr(0, u)), blank});
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Num: return number(next());
      case Token::Str: return str(next().text);
      case Token::Ident: return ident(next().text);
      case Token::End: fail("unexpected end of input");
      case Token::Op: break;
    }
    if (at_op("(")) {
      ++p_;
      Expr e = compound();
      expect(")");
      return e;
    }
    if (at_op("{")) {
      ++p_;
      std::vector<Expr> items = sequence("}");
      expect("}");
      return app("List", std::move(items));
    }
    fail("unexpected '" + t.text + "'");
  }

  std::vector<Token> t_;
  std::size_t p_ = 0;
};

}  // namespace

Expr parse(std::string_view src) { return Parser(Lexer(src).run()).top(); }

}  // namespace casbridge::cas
