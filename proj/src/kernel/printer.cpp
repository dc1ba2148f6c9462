#include "casbridge/kernel/printer.hpp"

#include <map>

#include "casbridge/kernel/environment.hpp"
#include "casbridge/kernel/numeral.hpp"

namespace casbridge::kernel {

namespace {

std::string sort_str(const Level& l) {
  if (!l.is_param() && l.lit == 0) return "Prop";
  if (!l.is_param() && l.lit == 1) return "Type";
  return "Sort " + l.str();
}

std::string binder_name(const std::vector<std::string>& names, std::uint64_t i) {
  if (i < names.size()) return names[names.size() - 1 - i];
  return "#" + std::to_string(i);
}

// Raw --------------------------------------------------------------------

class RawPrinter {
 public:
  std::string print(const Expr& e, bool atomic) {
    switch (e.kind()) {
      case ExprKind::Var: return binder_name(names_, e.var_index());
      case ExprKind::Sort: return wrap(sort_str(e.level()), atomic && e.level() != Level::of(0) && e.level() != Level::of(1));
      case ExprKind::Const: return e.name().str();
      case ExprKind::MVar: return "?" + e.name().str();
      case ExprKind::Local: return e.pretty_name().str();
      case ExprKind::Placeholder: return "_";
      case ExprKind::NatLit: return print(numeral_encode(e.nat_value()), atomic);
      case ExprKind::App: {
        std::string out = print(app_fn(e), true);
        for (const auto& a : app_args(e)) out += " " + print(a, true);
        return wrap(out, atomic);
      }
      case ExprKind::Lam:
      case ExprKind::Pi: {
        bool lam = e.kind() == ExprKind::Lam;
        std::string dom = print(e.type(), false);
        std::string n = e.name().str();
        if (!lam && !has_loose_bvar(e.body(), 0)) {
          names_.push_back(n);
          std::string body = print(e.body(), false);
          names_.pop_back();
          return wrap(print(e.type(), true) + " → " + body, atomic);
        }
        names_.push_back(n);
        std::string body = print(e.body(), false);
        names_.pop_back();
        const char* open = e.binder_info() == BinderInfo::Implicit ? "{" : e.binder_info() == BinderInfo::InstImplicit ? "[" : "(";
        const char* close = e.binder_info() == BinderInfo::Implicit ? "}" : e.binder_info() == BinderInfo::InstImplicit ? "]" : ")";
        return wrap(std::string(lam ? "λ " : "Π ") + open + n + " : " + dom + close + ", " + body, atomic);
      }
      case ExprKind::Let: {
        std::string ty = print(e.type(), false);
        std::string val = print(e.value(), false);
        names_.push_back(e.name().str());
        std::string body = print(e.body(), false);
        names_.pop_back();
        return wrap("let " + e.name().str() + " : " + ty + " := " + val + " in " + body, atomic);
      }
    }
    return "?";
  }

 private:
  static std::string wrap(const std::string& s, bool paren) { return paren ? "(" + s + ")" : s; }
  std::vector<std::string> names_;
};

// Pretty -----------------------------------------------------------------

struct OpInfo {
  const char* sym;
  int prec;
  enum Assoc { Left, Right, None } assoc;
};

const std::map<std::string, OpInfo>& binary_ops() {
  static const std::map<std::string, OpInfo> ops = {
      {"add", {"+", 65, OpInfo::Left}},  {"sub", {"-", 65, OpInfo::Left}},  {"mul", {"*", 70, OpInfo::Left}},
      {"div", {"/", 70, OpInfo::Left}},  {"pow_nat", {"^", 75, OpInfo::Right}}, {"eq", {"=", 50, OpInfo::None}},
      {"ne", {"≠", 50, OpInfo::None}},   {"lt", {"<", 50, OpInfo::None}},   {"le", {"≤", 50, OpInfo::None}},
      {"gt", {">", 50, OpInfo::None}},   {"ge", {"≥", 50, OpInfo::None}},   {"and", {"∧", 35, OpInfo::Right}},
      {"or", {"∨", 30, OpInfo::Right}},  {"iff", {"↔", 20, OpInfo::None}},
  };
  return ops;
}

constexpr int kMaxPrec = 1024;
constexpr int kArrowPrec = 25;

class PrettyPrinter {
 public:
  explicit PrettyPrinter(const Environment& env) : env_(env) {}

  std::string print(const Expr& e, int prec) {
    switch (e.kind()) {
      case ExprKind::Var: return binder_name(names_, e.var_index());
      case ExprKind::Sort: return sort_str(e.level());
      case ExprKind::Const:
        if (is_numeral(e)) return numeral_decode(e).get_str();
        return e.name().str();
      case ExprKind::MVar: return "?" + e.name().str();
      case ExprKind::Local: return e.pretty_name().str();
      case ExprKind::Placeholder: return "_";
      case ExprKind::NatLit: return e.nat_value().get_str();
      case ExprKind::App: return app(e, prec);
      case ExprKind::Lam: {
        std::string n = e.name().str();
        std::string ty = print(e.type(), 0);
        names_.push_back(n);
        std::string body = print(e.body(), 0);
        names_.pop_back();
        return paren("λ (" + n + " : " + ty + "), " + body, prec > 0);
      }
      case ExprKind::Pi: {
        if (!has_loose_bvar(e.body(), 0)) {
          std::string dom = print(e.type(), kArrowPrec + 1);
          names_.push_back(e.name().str());
          std::string cod = print(e.body(), kArrowPrec);
          names_.pop_back();
          return paren(dom + " → " + cod, prec > kArrowPrec);
        }
        std::string n = e.name().str();
        std::string ty = print(e.type(), 0);
        names_.push_back(n);
        std::string body = print(e.body(), 0);
        names_.pop_back();
        return paren("∀ (" + n + " : " + ty + "), " + body, prec > 0);
      }
      case ExprKind::Let: {
        std::string val = print(e.value(), 0);
        names_.push_back(e.name().str());
        std::string body = print(e.body(), 0);
        names_.pop_back();
        return paren("let " + e.name().str() + " := " + val + " in " + body, prec > 0);
      }
    }
    return "?";
  }

 private:
  static std::string paren(const std::string& s, bool p) { return p ? "(" + s + ")" : s; }

  /// Explicit arguments of an application spine, dropping implicit and
  /// instance arguments according to the head constant's signature.
  std::vector<Expr> explicit_args(const Expr& head, const std::vector<Expr>& args) const {
    if (!head.is_const()) return args;
    const Declaration* d = env_.find(head.name());
    if (!d) return args;
    std::vector<Expr> out;
    Expr ty = d->type;
    for (const auto& a : args) {
      if (ty && ty.kind() == ExprKind::Pi) {
        if (ty.binder_info() == BinderInfo::Default) out.push_back(a);
        ty = ty.body();
      } else {
        out.push_back(a);
        ty = Expr();
      }
    }
    return out;
  }

  std::string app(const Expr& e, int prec) {
    const Expr& head = app_fn(e);
    if (is_numeral(e)) {
      try {
        return numeral_decode(e).get_str();
      } catch (const NotANumeral&) {
      }
    }
    auto args = explicit_args(head, app_args(e));
    if (head.is_const()) {
      const std::string n = head.name().str();
      if (auto it = binary_ops().find(n); it != binary_ops().end() && args.size() == 2) {
        const auto& op = it->second;
        int lp = op.assoc == OpInfo::Left ? op.prec : op.prec + 1;
        int rp = op.assoc == OpInfo::Right ? op.prec : op.prec + 1;
        std::string sep = n == "pow_nat" ? "^" : std::string(" ") + op.sym + " ";
        return paren(print(args[0], lp) + sep + print(args[1], rp), prec > op.prec);
      }
      if (n == "neg" && args.size() == 1) return paren("-" + print(args[0], kMaxPrec), prec > 65);
      if (n == "not" && args.size() == 1) return paren("¬" + print(args[0], kMaxPrec), prec > 40);
      if (n == "Exists" && args.size() == 1 && args[0].kind() == ExprKind::Lam) {
        const Expr& lam = args[0];
        names_.push_back(lam.name().str());
        std::string body = print(lam.body(), 0);
        names_.pop_back();
        return paren("∃ " + lam.name().str() + ", " + body, prec > 0);
      }
    }
    if (args.empty()) return print(head, prec);
    std::string out = print(head, kMaxPrec);
    for (const auto& a : args) out += " " + print(a, kMaxPrec);
    return paren(out, prec >= kMaxPrec);
  }

  const Environment& env_;
  std::vector<std::string> names_;
};

}  // namespace

std::string print_raw(const Expr& e) { return RawPrinter().print(e, false); }

std::string pretty(const Environment& env, const Expr& e) { return PrettyPrinter(env).print(e, 0); }

}  // namespace casbridge::kernel
