#include <set>
#include <sstream>

#include "casbridge/bridge/reflect.hpp"
#include "casbridge/cas/number.hpp"
#include "casbridge/error.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/tactics/tactics.hpp"

namespace casbridge::tactics {

void LinAtom::normalize() {
  for (auto it = terms.begin(); it != terms.end();) it = it->second == 0 ? terms.erase(it) : std::next(it);
}

std::string to_string(const LinAtom& a) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [v, c] : a.terms) {
    out << (first ? "" : " + ") << c << "*" << v;
    first = false;
  }
  if (first || a.constant != 0) out << (first ? "" : " + ") << a.constant;
  out << (a.rel == LinRel::Lt ? " < 0" : a.rel == LinRel::Le ? " <= 0" : " = 0");
  return out.str();
}

namespace {

std::string var_key(const cas::Expr& v) {
  if (v.is_app("LeanLocal", 4) && v.arg(0).is_str() && v.arg(1).is_str()) return v.arg(1).str() + "@" + v.arg(0).str();
  return cas::render(v);
}

}  // namespace

LinAtom lin_atom_of(const kernel::Environment& env, const kernel::Expr& hyp) {
  const kernel::Expr& f = kernel::app_fn(hyp);
  auto args = kernel::app_args(hyp);
  std::string op = f.is_const() ? f.name().str() : "";
  kernel::Expr lhs, rhs;
  LinAtom atom;
  if ((op == "lt" || op == "le") && args.size() == 4) {
    lhs = args[2], rhs = args[3];
    atom.rel = op == "lt" ? LinRel::Lt : LinRel::Le;
  } else if ((op == "gt" || op == "ge") && args.size() == 4) {
    lhs = args[3], rhs = args[2];
    atom.rel = op == "gt" ? LinRel::Lt : LinRel::Le;
  } else if (op == "eq" && args.size() == 3) {
    lhs = args[1], rhs = args[2];
    atom.rel = LinRel::Eq;
  } else if (op == "ne") {
    throw UnsupportedFragment("disequality hypotheses are not supported: " + kernel::print_raw(hyp));
  } else {
    throw UnsupportedFragment("not a comparison: " + kernel::print_raw(hyp));
  }
  cas::Poly p;
  try {
    p = kernel_poly(env, lhs) - kernel_poly(env, rhs);
  } catch (const RingNormalizationFailed& e) {
    throw UnsupportedFragment(e.detail());
  }
  for (const auto& [m, c] : p.terms()) {
    if (m.empty()) {
      atom.constant = c;
    } else if (m.size() == 1 && m[0].second == 1) {
      atom.terms[var_key(m[0].first)] = c;
    } else {
      throw UnsupportedFragment("nonlinear term in " + kernel::print_raw(hyp));
    }
  }
  return atom;
}

bool check_farkas(const std::vector<LinAtom>& hyps, const FarkasCertificate& cert) {
  if (hyps.size() != cert.coeffs.size()) return false;
  std::map<std::string, mpq_class> sum;
  mpq_class q = 0;
  bool strict = false;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const mpq_class& c = cert.coeffs[i];
    if (c < 0 && hyps[i].rel != LinRel::Eq) return false;
    if (c == 0) continue;
    if (hyps[i].rel == LinRel::Lt) strict = true;
    for (const auto& [v, a] : hyps[i].terms) sum[v] += c * a;
    q += c * hyps[i].constant;
  }
  for (const auto& [v, a] : sum) {
    if (a != 0) return false;
  }
  // The combination reads q < 0 (some strict row used) or q <= 0.
  return q > 0 || (q == 0 && strict);
}

namespace {

struct FmRow {
  std::map<std::string, mpq_class> terms;
  mpq_class constant;
  bool strict = false;
  std::vector<mpq_class> mult;
};

bool contradictory(const FmRow& r) {
  if (!r.terms.empty()) return false;
  return r.constant > 0 || (r.constant == 0 && r.strict);
}

FmRow combine(const FmRow& a, const mpq_class& ka, const FmRow& b, const mpq_class& kb) {
  FmRow r;
  for (const auto& [v, c] : a.terms) r.terms[v] += ka * c;
  for (const auto& [v, c] : b.terms) r.terms[v] += kb * c;
  for (auto it = r.terms.begin(); it != r.terms.end();) it = it->second == 0 ? r.terms.erase(it) : std::next(it);
  r.constant = ka * a.constant + kb * b.constant;
  r.strict = a.strict || b.strict;
  r.mult.resize(a.mult.size());
  for (std::size_t i = 0; i < r.mult.size(); ++i) r.mult[i] = ka * a.mult[i] + kb * b.mult[i];
  return r;
}

constexpr std::size_t kMaxFmRows = 20000;

}  // namespace

FarkasOracle fm_oracle(std::size_t max_vars) {
  return [max_vars](const std::vector<LinAtom>& hyps) -> std::optional<FarkasCertificate> {
    std::vector<FmRow> rows;
    std::set<std::string> vars;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      for (int sign : {1, -1}) {
        if (sign < 0 && hyps[i].rel != LinRel::Eq) break;
        FmRow r;
        for (const auto& [v, c] : hyps[i].terms) {
          if (c != 0) r.terms[v] = sign * c;
          vars.insert(v);
        }
        r.constant = sign * hyps[i].constant;
        r.strict = hyps[i].rel == LinRel::Lt;
        r.mult.assign(hyps.size(), 0);
        r.mult[i] = sign;
        rows.push_back(std::move(r));
      }
    }
    if (vars.size() > max_vars) return std::nullopt;
    for (const auto& v : vars) {
      for (const auto& r : rows) {
        if (contradictory(r)) return FarkasCertificate{r.mult};
      }
      std::vector<FmRow> pos, neg, next;
      for (auto& r : rows) {
        auto it = r.terms.find(v);
        if (it == r.terms.end()) {
          next.push_back(std::move(r));
        } else if (it->second > 0) {
          pos.push_back(std::move(r));
        } else {
          neg.push_back(std::move(r));
        }
      }
      if (next.size() + pos.size() * neg.size() > kMaxFmRows) return std::nullopt;
      for (const auto& p : pos) {
        for (const auto& n : neg) next.push_back(combine(p, -n.terms.at(v), n, p.terms.at(v)));
      }
      rows = std::move(next);
    }
    for (const auto& r : rows) {
      if (contradictory(r)) return FarkasCertificate{r.mult};
    }
    return std::nullopt;
  };
}

FarkasOracle cas_oracle(CasEval eval) {
  return [eval = std::move(eval)](const std::vector<LinAtom>& hyps) -> std::optional<FarkasCertificate> {
    std::map<std::string, cas::Expr> syms;
    std::vector<cas::Expr> rels;
    for (const auto& h : hyps) {
      cas::Poly p = cas::Poly::constant(h.constant);
      for (const auto& [v, c] : h.terms) {
        auto it = syms.find(v);
        if (it == syms.end()) it = syms.emplace(v, cas::sym("v" + std::to_string(syms.size()))).first;
        p = p + cas::Poly::variable(it->second).scaled(c);
      }
      const char* head = h.rel == LinRel::Lt ? "Less" : h.rel == LinRel::Le ? "LessEqual" : "Equal";
      rels.push_back(cas::app(head, {p.to_expr(), cas::integer(0)}));
    }
    cas::Expr r = eval(cas::render(cas::app("LPCertificate", {cas::list(rels)})));
    if (r.is_app("Failure") && r.arity() > 0 && r.arg(0).is_str() && r.arg(0).str() == "NoCertificate") return std::nullopt;
    try {
      expect_success(r);
    } catch (const RemoteError& e) {
      throw OracleFailed(e.detail());
    }
    if (!r.is_app("List")) throw OracleFailed("unexpected oracle answer " + cas::render(r));
    FarkasCertificate cert;
    for (const auto& c : r.args()) {
      auto q = cas::as_rational(c);
      if (!q) throw OracleFailed("non-rational coefficient " + cas::render(c));
      cert.coeffs.push_back(*q);
    }
    return cert;
  };
}

VerifiedResult linarith(const std::vector<LinAtom>& hyps, const FarkasOracle& oracle) {
  auto cert = oracle(hyps);
  if (!cert) throw OracleFailed("no certificate found; the hypotheses may be satisfiable");
  if (!check_farkas(hyps, *cert)) {
    std::ostringstream msg;
    msg << "certificate (";
    for (std::size_t i = 0; i < cert->coeffs.size(); ++i) msg << (i ? ", " : "") << cert->coeffs[i];
    msg << ") does not refute the hypotheses";
    throw CertificateRejected(msg.str());
  }
  return {kernel::mk_const("false"), "farkas", false};
}

}  // namespace casbridge::tactics
