#include "casbridge/cas/wire.hpp"

#include <cmath>

#include "casbridge/error.hpp"

namespace casbridge::cas {

using nlohmann::json;

json to_wire(const Expr& e) {
  switch (e.kind()) {
    case Kind::Sym: return {{"k", "sym"}, {"v", e.name()}};
    case Kind::Str: return {{"k", "str"}, {"v", e.str()}};
    case Kind::Int: return {{"k", "int"}, {"v", e.integer().get_str()}};
    case Kind::Real:
      if (!std::isfinite(e.real())) throw WireError("non-finite real cannot be serialized");
      return {{"k", "real"}, {"v", e.real()}};
    case Kind::App: {
      json args = json::array();
      for (const auto& a : e.args()) args.push_back(to_wire(a));
      return {{"k", "app"}, {"h", to_wire(e.head())}, {"a", std::move(args)}};
    }
  }
  throw WireError("unknown expression kind");
}

namespace {

bool valid_integer(const std::string& s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw WireError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

Expr from_wire(const json& j) {
  if (!j.is_object()) throw WireError("expression must be an object");
  const json& k = field(j, "k");
  if (!k.is_string()) throw WireError("field 'k' must be a string");
  const std::string tag = k.get<std::string>();
  if (tag == "sym" || tag == "str") {
    const json& v = field(j, "v");
    if (!v.is_string()) throw WireError(tag + " payload must be a string");
    if (tag == "sym" && v.get<std::string>().empty()) throw WireError("empty symbol name");
    return tag == "sym" ? sym(v.get<std::string>()) : str(v.get<std::string>());
  }
  if (tag == "int") {
    const json& v = field(j, "v");
    if (!v.is_string() || !valid_integer(v.get<std::string>())) throw WireError("int payload must be a decimal string");
    return integer(mpz_class(v.get<std::string>()));
  }
  if (tag == "real") {
    const json& v = field(j, "v");
    if (!v.is_number()) throw WireError("real payload must be a number");
    return real(v.get<double>());
  }
  if (tag == "app") {
    const json& a = field(j, "a");
    if (!a.is_array()) throw WireError("app arguments must be an array");
    std::vector<Expr> args;
    args.reserve(a.size());
    for (const auto& x : a) args.push_back(from_wire(x));
    return app(from_wire(field(j, "h")), std::move(args));
  }
  throw WireError("unknown tag '" + tag + "'");
}

}  // namespace casbridge::cas
