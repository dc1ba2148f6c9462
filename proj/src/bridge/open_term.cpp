#include <algorithm>

#include "casbridge/bridge/translate.hpp"
#include "casbridge/kernel/elaborate.hpp"

namespace casbridge::bridge {

namespace {

void free_symbols(const cas::Expr& e, const RuleRegistry& reg, std::vector<std::string>& out) {
  if (e.is_sym()) {
    for (const auto& r : reg.sym_rules()) {
      if (r.cas_symbol == e.name()) return;
    }
    if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
    return;
  }
  if (!e.is_app()) return;
  if (!e.head().is_sym()) free_symbols(e.head(), reg, out);
  for (const auto& a : e.args()) free_symbols(a, reg, out);
}

}  // namespace

OpenTerm elaborate_open(const RuleRegistry& reg, const cas::Expr& e, const kernel::Expr& free_type,
                        const std::optional<kernel::Expr>& expected) {
  OpenTerm out;
  free_symbols(e, reg, out.names);
  TransEnv tenv;
  for (const auto& n : out.names) {
    kernel::Expr l = kernel::mk_local(kernel::fresh_unique_name(), kernel::Name(std::vector<std::string>{n}),
                                      kernel::BinderInfo::Default, free_type);
    tenv[n] = l;
    out.locals.push_back(l);
  }
  out.term = kernel::elaborate(reg.env(), pexpr_of_mmexpr(reg, tenv, e), expected);
  return out;
}

}  // namespace casbridge::bridge
