#include "casbridge/cas/engine.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "casbridge/cas/match.hpp"
#include "casbridge/cas/parse.hpp"
#include "casbridge/error.hpp"

#ifndef CASBRIDGE_DATA_DIR
#define CASBRIDGE_DATA_DIR "data"
#endif

namespace casbridge::cas {

namespace {

constexpr std::size_t kMaxDepth = 4000;

bool holds_all(const std::string& h) {
  static const std::unordered_set<std::string> s{"Hold",    "HoldForm",   "Inactive", "Function",
                                                 "SetDelayed", "CompoundExpression", "Pattern", "Plot", "LPCertificate"};
  return s.count(h) > 0;
}

bool holds_first(const std::string& h) { return h == "Set"; }

std::string rule_key(const Expr& lhs) {
  if (lhs.is_sym()) return lhs.name();
  if (lhs.is_app()) return lhs.head_name();
  return "";
}

}  // namespace

void RuleStore::add(RewriteRule r) {
  std::string key = rule_key(r.lhs);
  if (key.empty()) throw EvalError("cannot define a rule for " + render(r.lhs));
  auto& v = rules_[key];
  for (auto& old : v) {
    if (old.lhs == r.lhs) {
      old = std::move(r);
      return;
    }
  }
  v.push_back(std::move(r));
}

const std::vector<RewriteRule>* RuleStore::find(const std::string& key) const {
  auto it = rules_.find(key);
  return it == rules_.end() ? nullptr : &it->second;
}

std::size_t RuleStore::size() const {
  std::size_t n = 0;
  for (const auto& [k, v] : rules_) n += v.size();
  return n;
}

GlobalContext::GlobalContext() : store_(std::make_shared<RuleStore>()) {}

std::shared_ptr<const RuleStore> GlobalContext::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return store_;
}

void GlobalContext::add(RewriteRule r) {
  std::lock_guard<std::mutex> lock(mu_);
  auto next = std::make_shared<RuleStore>(*store_);
  next->add(std::move(r));
  store_ = std::move(next);
}

void GlobalContext::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  store_ = std::make_shared<RuleStore>();
}

Context::Context(std::shared_ptr<GlobalContext> global, Scope scope) : global_(std::move(global)), scope_(scope) {}

Expr Context::evaluate(const Expr& e) {
  steps_ = 0;
  depth_ = 0;
  fresh_ = 0;
  return eval(e);
}

Expr Context::evaluate_nested(const Expr& e) { return eval(e); }

void Context::define(RewriteRule r) {
  if (scope_ == Scope::Global) {
    global_->add(std::move(r));
  } else {
    local_.add(std::move(r));
  }
}

void Context::clear() { local_ = RuleStore(); }

Expr Context::fresh_symbol(const std::string& prefix) { return sym(prefix + std::to_string(fresh_++)); }

void Context::count_step() {
  if (++steps_ > step_budget) throw StepBudgetExceeded("more than " + std::to_string(step_budget) + " rewrite steps");
}

Expr Context::eval(const Expr& e) {
  if (++depth_ > kMaxDepth) {
    depth_ = 0;
    throw StepBudgetExceeded("evaluation nested deeper than " + std::to_string(kMaxDepth));
  }
  Expr cur = e;
  while (true) {
    Expr next = eval_once(cur);
    if (next == cur) {
      --depth_;
      return next;
    }
    count_step();
    cur = std::move(next);
  }
}

std::optional<Expr> Context::apply_rules(const RuleStore& store, const std::string& key, const Expr& e) {
  const auto* rules = store.find(key);
  if (!rules) return std::nullopt;
  for (const auto& r : *rules) {
    if (r.lhs.is_sym() != e.is_sym()) continue;
    if (e.is_sym()) {
      if (r.lhs == e) return r.rhs;
      continue;
    }
    Bindings b;
    if (match_into(r.lhs, e, b)) return substitute(r.rhs, b);
  }
  return std::nullopt;
}

Expr Context::eval_once(const Expr& e) {
  if (e.is_sym()) {
    if (auto r = apply_rules(local_, e.name(), e)) return *r;
    if (auto r = apply_rules(*global_->snapshot(), e.name(), e)) return *r;
    return e;
  }
  if (!e.is_app()) return e;

  Expr h = eval(e.head());
  std::string hn = h.is_sym() ? h.name() : "";
  bool all = holds_all(hn);
  bool changed = h.raw() != e.head().raw();
  std::vector<Expr> args;
  args.reserve(e.arity());
  for (std::size_t i = 0; i < e.arity(); ++i) {
    const Expr& a = e.arg(i);
    if (all || (i == 0 && holds_first(hn))) {
      args.push_back(a);
      continue;
    }
    Expr v = eval(a);
    if (is_failure(v) && hn != "List" && hn != "Failure") return v;
    changed = changed || v.raw() != a.raw();
    args.push_back(std::move(v));
  }
  Expr cur = changed ? app(h, std::move(args)) : e;

  std::string key = cur.head_name();
  if (!key.empty()) {
    if (auto r = apply_rules(local_, key, cur)) return *r;
    if (auto r = apply_rules(*global_->snapshot(), key, cur)) return *r;
  }

  if (h.is_app("Function", 2)) {
    const Expr& params = h.arg(0);
    Bindings b;
    if (params.is_sym() && cur.arity() == 1) {
      b.emplace(params.name(), cur.arg(0));
    } else if (params.is_app("List", cur.arity())) {
      for (std::size_t i = 0; i < cur.arity(); ++i) {
        if (!params.arg(i).is_sym()) return cur;
        b.emplace(params.arg(i).name(), cur.arg(i));
      }
    } else {
      return cur;
    }
    return substitute(h.arg(1), b);
  }

  if (!hn.empty()) {
    const auto& table = builtins();
    auto it = table.find(hn);
    if (it != table.end()) {
      try {
        if (auto r = it->second(*this, cur)) return *r;
      } catch (const StepBudgetExceeded&) {
        throw;
      } catch (const Error& err) {
        return failure(err.kind(), err.detail());
      }
    }
  }
  return cur;
}

Expr strip_inactive(const Expr& e) {
  if (e.is_app("Inactive", 1)) return strip_inactive(e.arg(0));
  if (!e.is_app()) return e;
  std::vector<Expr> args;
  for (const auto& a : e.args()) args.push_back(strip_inactive(a));
  return app(strip_inactive(e.head()), std::move(args));
}

Expr failure(const std::string& kind, const std::string& message) { return app("Failure", {str(kind), str(message)}); }

bool is_failure(const Expr& e) { return e.is_app("Failure"); }

void load_rule_text(Context& ctx, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string_view t(line.data() + b, e - b + 1);
    if (t.substr(0, 2) == "(*" && t.substr(t.size() - 2) == "*)") continue;
    Expr parsed;
    try {
      parsed = parse(t);
    } catch (const ParseError& err) {
      throw ParseError(origin + " line " + std::to_string(n) + ": " + err.detail());
    }
    Expr r = ctx.evaluate(parsed);
    if (is_failure(r)) throw EvalError(origin + " line " + std::to_string(n) + ": " + render(r));
  }
}

void load_rule_file(Context& ctx, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EvalError("cannot read rule file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  load_rule_text(ctx, ss.str(), path.filename().string());
}

std::filesystem::path data_path(const std::string& file) {
  if (const char* p = std::getenv("CASBRIDGE_DATA")) return std::filesystem::path(p) / file;
  return std::filesystem::path(CASBRIDGE_DATA_DIR) / file;
}

std::shared_ptr<GlobalContext> make_default_global() {
  auto g = std::make_shared<GlobalContext>();
  Context ctx(g, Context::Scope::Global);
  load_rule_file(ctx, data_path("leanform.m"));
  return g;
}

}  // namespace casbridge::cas
