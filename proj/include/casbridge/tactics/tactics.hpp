#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casbridge/cas/linalg.hpp"
#include "casbridge/cas/poly.hpp"
#include "casbridge/kernel/environment.hpp"
#include "casbridge/tactics/cas_eval.hpp"

namespace casbridge::tactics {

struct VerifiedResult {
  kernel::Expr statement;
  /// Name of the checker that accepted the statement, or "axiom".
  std::string method;
  bool trusted = false;
};

// ---- ring normalization ---------------------------------------------------

/// Polynomial of an elaborated arithmetic term. Locals and other
/// non-arithmetic subterms are variables, keyed by their reflection.
/// Throws RingNormalizationFailed for operations that are not ring
/// operations at the term's carrier (sub/neg on nat, non-constant division).
cas::Poly kernel_poly(const kernel::Environment& env, const kernel::Expr& e);

/// Proves `l = r` by comparing canonical polynomials.
/// Throws RingNormalizationFailed("unable to simplify").
VerifiedResult eq_by_ring(const kernel::Environment& env, const kernel::Expr& l, const kernel::Expr& r);

struct FactorResult {
  kernel::Expr factored;
  VerifiedResult proof;
};

/// reflect, LeanConvert, Activate, Factor on the CAS side; back-translate,
/// elaborate at the type of `e` and check with eq_by_ring.
FactorResult factor_tactic(const CasEval& eval, const kernel::Environment& env, const kernel::Expr& e);

// ---- linear arithmetic ----------------------------------------------------

enum class LinRel { Le, Lt, Eq };

/// terms + constant (rel) 0.
struct LinAtom {
  std::map<std::string, mpq_class> terms;
  mpq_class constant;
  LinRel rel = LinRel::Le;

  /// Drops zero coefficients.
  void normalize();
};

std::string to_string(const LinAtom& a);

struct FarkasCertificate {
  std::vector<mpq_class> coeffs;
};

/// Normal form of an elaborated `lt/le/eq/gt/ge` comparison at an ordered
/// field carrier. Throws UnsupportedFragment (nonlinear, `ne`, other shapes).
LinAtom lin_atom_of(const kernel::Environment& env, const kernel::Expr& hyp);

/// The trusted checker. Equalities may take multipliers of either sign.
bool check_farkas(const std::vector<LinAtom>& hyps, const FarkasCertificate& cert);

using FarkasOracle = std::function<std::optional<FarkasCertificate>(const std::vector<LinAtom>&)>;

/// Local Fourier-Motzkin elimination with multiplier tracking. At most
/// `max_vars` variables; larger problems return nullopt.
FarkasOracle fm_oracle(std::size_t max_vars = 12);
/// Sends LPCertificate[{...}] through `eval`.
FarkasOracle cas_oracle(CasEval eval);

/// Proves `false` from `hyps`. Throws OracleFailed or CertificateRejected.
VerifiedResult linarith(const std::vector<LinAtom>& hyps, const FarkasOracle& oracle);

// ---- numerals, solving, matrices -------------------------------------------

/// Exact value of a ground arithmetic term. Throws NotGround.
mpq_class eval_ground(const kernel::Environment& env, const kernel::Expr& e);

/// Decides a ground comparison. The statement is `e` when it holds and
/// `not e` otherwise. Throws NotGround or UnsupportedFragment.
VerifiedResult norm_num(const kernel::Environment& env, const kernel::Expr& e);

/// Pre-expression for a rational at any carrier with division.
kernel::Expr rational_pre(const mpq_class& q);

struct SolveResult {
  std::vector<mpq_class> witnesses;
  std::vector<VerifiedResult> checks;
  VerifiedResult proof;
};

/// Goal `Exists (fun x, ... Exists (fun y, eq .. ∧ eq ..))`. Solves on the
/// CAS side, substitutes the first solution and checks every equation with
/// norm_num. Throws UnsupportedSystem or NoSolution.
SolveResult solve_polys(const CasEval& eval, const kernel::Environment& env, const kernel::Expr& goal);

struct LUCertificate {
  cas::Matrix L;
  cas::Matrix U;
  VerifiedResult proof;
};

/// Structural triangularity and entrywise L U = m. Throws VerificationFailed.
VerifiedResult verify_lu(const kernel::Environment& env, const cas::Matrix& m, const cas::Matrix& L, const cas::Matrix& U);
LUCertificate lu_decomp_tactic(const CasEval& eval, const kernel::Environment& env, const cas::Matrix& m);

// ---- plausibility, trusted results -----------------------------------------

struct Plausibility {
  enum Status { NoCountermodel, Countermodel, Inconclusive } status = Inconclusive;
  /// Variable (pretty name) to value, when a countermodel was found.
  std::map<std::string, mpq_class> countermodel;
  std::string reason;

  bool passed() const { return status == NoCountermodel; }
};

/// Looks for an assignment satisfying `hyps` and the negation of `goal`.
Plausibility plausibility_check(const CasEval& eval, const std::vector<kernel::Expr>& hyps, const kernel::Expr& goal);

/// Adds `stmt` as a TrustedAxiom named `name`. Throws TypeError when `stmt`
/// is not a proposition and DuplicateName.
kernel::Environment axiomatize(const kernel::Environment& env, const kernel::Name& name, const kernel::Expr& stmt,
                               const std::string& source);

struct Approximation {
  kernel::Environment env;
  mpq_class lo, hi;
  kernel::Expr statement;
};

/// Evaluates N[e] on the CAS side, brackets the value between rationals
/// with `digits` decimals and axiomatizes `lo < e ∧ e < hi`.
Approximation approx(const CasEval& eval, const kernel::Environment& env, const kernel::Name& name, const kernel::Expr& e,
                     unsigned digits = 4);

}  // namespace casbridge::tactics
