#include "casbridge/bridge/reflect.hpp"

#include <set>

namespace casbridge::bridge {

using cas::app;
using cas::integer;
using cas::list;
using cas::str;

namespace {

cas::Expr reflect_level(const kernel::Level& l) {
  if (l.is_param()) return app("LeanLevelParam", {str(l.param)});
  return integer(mpz_class(static_cast<unsigned long>(l.lit)));
}

[[noreturn]] void malformed(const cas::Expr& e, const std::string& why) {
  std::string r = cas::render(e);
  if (r.size() > 200) r = r.substr(0, 200) + "...";
  throw MalformedReflection(why + ": " + r);
}

const std::string& field_str(const cas::Expr& e, std::size_t i) {
  if (!e.arg(i).is_str()) malformed(e, "field " + std::to_string(i + 1) + " must be a string");
  return e.arg(i).str();
}

kernel::Name field_name(const cas::Expr& e, std::size_t i) {
  const std::string& s = field_str(e, i);
  try {
    return kernel::Name::parse(s);
  } catch (const std::exception&) {
    malformed(e, "bad name \"" + s + "\"");
  }
}

kernel::BinderInfo field_binfo(const cas::Expr& e, std::size_t i) {
  const std::string& s = field_str(e, i);
  if (s == "default") return kernel::BinderInfo::Default;
  if (s == "implicit") return kernel::BinderInfo::Implicit;
  if (s == "inst") return kernel::BinderInfo::InstImplicit;
  malformed(e, "unknown binder info \"" + s + "\"");
}

std::uint64_t field_index(const cas::Expr& e, const cas::Expr& v) {
  if (!v.is_int() || v.integer() < 0 || !v.integer().fits_ulong_p()) malformed(e, "expected a natural number");
  return v.integer().get_ui();
}

kernel::Level decode_level(const cas::Expr& owner, const cas::Expr& l) {
  if (l.is_app("LeanLevelParam", 1) && l.arg(0).is_str()) return kernel::Level::named(l.arg(0).str());
  return kernel::Level::of(field_index(owner, l));
}

void expect_arity(const cas::Expr& e, std::size_t n) {
  if (e.arity() != n) malformed(e, e.head_name() + " expects " + std::to_string(n) + " fields");
}

}  // namespace

cas::Expr reflect(const kernel::Expr& e) {
  using kernel::ExprKind;
  switch (e.kind()) {
    case ExprKind::Var: return app("LeanVar", {integer(mpz_class(static_cast<unsigned long>(e.var_index())))});
    case ExprKind::Sort: return app("LeanSort", {reflect_level(e.level())});
    case ExprKind::Const: {
      std::vector<cas::Expr> ls;
      for (const auto& l : e.levels()) ls.push_back(reflect_level(l));
      return app("LeanConst", {str(e.name().str()), list(std::move(ls))});
    }
    case ExprKind::MVar: return app("LeanMVar", {str(e.name().str()), reflect(e.type())});
    case ExprKind::Local:
      return app("LeanLocal", {str(e.name().str()), str(e.pretty_name().str()), str(kernel::to_string(e.binder_info())),
                               reflect(e.type())});
    case ExprKind::App: return app("LeanApp", {reflect(e.fn()), reflect(e.arg())});
    case ExprKind::Lam:
    case ExprKind::Pi:
      return app(e.kind() == ExprKind::Lam ? "LeanLambda" : "LeanPi",
                 {str(e.name().str()), str(kernel::to_string(e.binder_info())), reflect(e.type()), reflect(e.body())});
    case ExprKind::Let:
      return app("LeanLet", {str(e.name().str()), reflect(e.type()), reflect(e.value()), reflect(e.body())});
    case ExprKind::NatLit: return app("LeanNatLit", {integer(e.nat_value())});
    case ExprKind::Placeholder: return app("LeanPlaceholder", {});
  }
  return cas::Expr();
}

kernel::Expr decode_reflection(const cas::Expr& e) {
  if (!e.is_app() || !e.head().is_sym()) malformed(e, "not a reflected expression");
  const std::string& h = e.head().name();
  if (h == "LeanVar") {
    expect_arity(e, 1);
    return kernel::mk_var(field_index(e, e.arg(0)));
  }
  if (h == "LeanSort") {
    expect_arity(e, 1);
    return kernel::mk_sort(decode_level(e, e.arg(0)));
  }
  if (h == "LeanConst") {
    expect_arity(e, 2);
    if (!e.arg(1).is_app("List")) malformed(e, "levels must be a list");
    std::vector<kernel::Level> ls;
    for (const auto& l : e.arg(1).args()) ls.push_back(decode_level(e, l));
    return kernel::mk_const(field_name(e, 0), std::move(ls));
  }
  if (h == "LeanMVar") {
    expect_arity(e, 2);
    return kernel::mk_mvar(field_name(e, 0), decode_reflection(e.arg(1)));
  }
  if (h == "LeanLocal") {
    expect_arity(e, 4);
    return kernel::mk_local(field_name(e, 0), field_name(e, 1), field_binfo(e, 2), decode_reflection(e.arg(3)));
  }
  if (h == "LeanApp") {
    expect_arity(e, 2);
    return kernel::mk_app(decode_reflection(e.arg(0)), decode_reflection(e.arg(1)));
  }
  if (h == "LeanLambda" || h == "LeanPi") {
    expect_arity(e, 4);
    auto make = h == "LeanLambda" ? kernel::mk_lambda : kernel::mk_pi;
    return make(field_name(e, 0), field_binfo(e, 1), decode_reflection(e.arg(2)), decode_reflection(e.arg(3)));
  }
  if (h == "LeanLet") {
    expect_arity(e, 4);
    return kernel::mk_let(field_name(e, 0), decode_reflection(e.arg(1)), decode_reflection(e.arg(2)),
                          decode_reflection(e.arg(3)));
  }
  if (h == "LeanNatLit") {
    expect_arity(e, 1);
    if (!e.arg(0).is_int() || e.arg(0).integer() < 0) malformed(e, "expected a natural number");
    return kernel::mk_nat(e.arg(0).integer());
  }
  if (h == "LeanPlaceholder") {
    expect_arity(e, 0);
    return kernel::mk_placeholder();
  }
  malformed(e, "unknown reflection head");
}

bool is_reflection_head(const cas::Expr& e) {
  static const std::set<std::string> heads{"LeanVar", "LeanSort",   "LeanConst", "LeanMVar",   "LeanLocal",
                                           "LeanApp", "LeanLambda", "LeanPi",    "LeanLet",    "LeanNatLit",
                                           "LeanPlaceholder"};
  return e.is_app() && e.head().is_sym() && heads.count(e.head().name()) > 0;
}

}  // namespace casbridge::bridge
