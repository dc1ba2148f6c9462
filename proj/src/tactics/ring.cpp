#include "casbridge/bridge/reflect.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/elaborate.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/kernel/type_check.hpp"
#include "casbridge/tactics/tactics.hpp"

namespace casbridge::tactics {

namespace {

using kernel::Expr;

[[noreturn]] void fail(const std::string& why) { throw RingNormalizationFailed("unable to simplify: " + why); }

std::string carrier_of(const Expr& t) { return t.is_const() ? t.name().str() : ""; }

class Reader {
 public:
  explicit Reader(const kernel::Environment& env) : env_(env) {}

  cas::Poly read(const Expr& e) {
    if (e.kind() == kernel::ExprKind::NatLit) return cas::Poly::constant(mpq_class(e.nat_value()));
    const Expr& f = kernel::app_fn(e);
    if (f.is_const()) {
      auto args = kernel::app_args(e);
      std::string op = f.name().str();
      std::size_t n = args.size();
      if (op == "zero" && n == 2) return cas::Poly::constant(0);
      if (op == "one" && n == 2) return cas::Poly::constant(1);
      if (op == "bit0" && n == 3) return read(args[2]).scaled(2);
      if (op == "bit1" && n == 4) return read(args[3]).scaled(2) + cas::Poly::constant(1);
      if (op == "add" && n == 4) return read(args[2]) + read(args[3]);
      if (op == "mul" && n == 4) return read(args[2]) * read(args[3]);
      if ((op == "sub" && n == 4) || (op == "neg" && n == 3)) {
        if (carrier_of(args[0]) == "nat") fail(op + " is truncated on nat");
        return op == "neg" ? -read(args[2]) : read(args[2]) - read(args[3]);
      }
      if (op == "div" && n == 4) {
        if (carrier_of(args[0]) != "real") fail("division outside a field");
        cas::Poly d = read(args[3]);
        if (!d.is_constant() || d.constant_term() == 0) fail("division by a non-constant or zero");
        return read(args[2]).scaled(1 / d.constant_term());
      }
      if (op == "pow_nat" && n == 4) {
        cas::Poly k = read(args[3]);
        if (!k.is_constant() || k.constant_term().get_den() != 1 || k.constant_term() < 0 ||
            k.constant_term() > 100000) {
          fail("exponent is not a small natural numeral");
        }
        return read(args[2]).pow(k.constant_term().get_num().get_ui());
      }
    }
    if (e.has_loose_bvars()) fail("bound variable in an arithmetic position");
    return cas::Poly::variable(bridge::reflect(e));
  }

 private:
  const kernel::Environment& env_;
};

}  // namespace

cas::Poly kernel_poly(const kernel::Environment& env, const kernel::Expr& e) { return Reader(env).read(e); }

VerifiedResult eq_by_ring(const kernel::Environment& env, const kernel::Expr& l, const kernel::Expr& r) {
  Expr tl = kernel::type_check(env, l);
  Expr tr = kernel::type_check(env, r);
  if (!kernel::alpha_equal(tl, tr)) fail("sides have different types");
  std::string c = carrier_of(tl);
  if (c != "real" && c != "int" && c != "nat") fail("no commutative ring structure on " + kernel::print_raw(tl));
  if (kernel_poly(env, l) != kernel_poly(env, r)) fail("normal forms differ");
  Expr stmt = kernel::mk_app(kernel::mk_const("eq", {kernel::Level::of(0)}), {tl, l, r});
  kernel::type_check(env, stmt);
  return {stmt, "ring", false};
}

FactorResult factor_tactic(const CasEval& eval, const kernel::Environment& env, const kernel::Expr& e) {
  Expr type;
  try {
    type = kernel::type_check(env, e);
  } catch (const Error& err) {
    throw StageError("input: " + std::string(err.what()));
  }
  Expr pre = run_command_using(eval, "Factor[Activate[LeanConvert[%]]]", e, std::nullopt, bridge::make_prelude_registry(env));
  Expr factored;
  try {
    factored = kernel::elaborate(env, pre, type);
  } catch (const Error& err) {
    throw StageError("elaborate: " + std::string(err.what()));
  }
  try {
    return {factored, eq_by_ring(env, e, factored)};
  } catch (const Error& err) {
    throw StageError("verify: " + std::string(err.what()));
  }
}

}  // namespace casbridge::tactics
