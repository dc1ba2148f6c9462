#include "casbridge/tactics/cas_eval.hpp"

#include <sstream>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/error.hpp"

namespace casbridge::tactics {

CasEval local_cas(std::shared_ptr<cas::GlobalContext> global) {
  return [global = std::move(global)](const std::string& source) {
    try {
      cas::Context ctx(global, cas::Context::Scope::Local);
      return ctx.evaluate(cas::parse(source));
    } catch (const Error& e) {
      return cas::failure(e.kind(), e.detail());
    }
  };
}

const cas::Expr& expect_success(const cas::Expr& r) {
  if (!cas::is_failure(r)) return r;
  std::string kind = r.arity() > 0 && r.arg(0).is_str() ? r.arg(0).str() : "Failure";
  std::string msg = r.arity() > 1 && r.arg(1).is_str() ? r.arg(1).str() : cas::render(r);
  throw RemoteError(kind + ": " + msg);
}

std::string instantiate_template(const std::string& templ, const kernel::Expr& e, const std::optional<std::string>& aux_rules) {
  auto pos = templ.find('%');
  if (pos == std::string::npos || templ.find('%', pos + 1) != std::string::npos) {
    throw StageError("template: expected exactly one '%' in \"" + templ + "\"");
  }
  std::string cmd = templ.substr(0, pos) + cas::render(bridge::reflect(e)) + templ.substr(pos + 1);
  if (!aux_rules) return cmd;
  std::istringstream in(*aux_rules);
  std::string line, prefix;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line.compare(first, 2, "(*") == 0) continue;
    prefix += line + "; ";
  }
  return prefix.empty() ? cmd : "(" + prefix + cmd + ")";
}

kernel::Expr run_command_using(const CasEval& eval, const std::string& templ, const kernel::Expr& e,
                               const std::optional<std::string>& aux_rules, const bridge::RuleRegistry& reg) {
  std::string cmd = instantiate_template(templ, e, aux_rules);
  cas::Expr result;
  try {
    result = expect_success(eval(cmd));
  } catch (const Error& err) {
    throw StageError("cas: " + std::string(err.what()));
  }
  try {
    return bridge::pexpr_of_mmexpr(reg, {}, result);
  } catch (const Error& err) {
    throw StageError("translate: " + std::string(err.what()));
  }
}

}  // namespace casbridge::tactics
