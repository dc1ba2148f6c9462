#include <charconv>

#include "casbridge/error.hpp"
#include "casbridge/kernel/printer.hpp"
#include "casbridge/link/link.hpp"

namespace casbridge::link {

Response Response::success(std::uint64_t id, json result) {
  Response r;
  r.id = id;
  r.ok = true;
  r.result = std::move(result);
  return r;
}

Response Response::failure(std::uint64_t id, std::string error) {
  Response r;
  r.id = id;
  r.ok = false;
  r.error = std::move(error);
  return r;
}

json to_json(const Request& r) { return {{"id", r.id}, {"op", r.op}, {"payload", r.payload}}; }

json to_json(const Response& r) {
  json j{{"id", r.id}, {"ok", r.ok}, {"display", r.display}};
  j["result"] = r.result;
  if (r.error) j["error"] = *r.error;
  if (r.image_svg) j["image_svg"] = *r.image_svg;
  return j;
}

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw WireError("message is not a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw WireError(std::string("missing field '") + name + "'");
  return *it;
}

std::uint64_t id_of(const json& j) {
  const json& id = field(j, "id");
  if (!id.is_number_unsigned()) throw WireError("id must be a natural number");
  return id.get<std::uint64_t>();
}

}  // namespace

Request request_from_json(const json& j) {
  Request r;
  r.id = id_of(j);
  const json& op = field(j, "op");
  if (!op.is_string()) throw WireError("op must be a string");
  r.op = op.get<std::string>();
  r.payload = field(j, "payload");
  if ((r.op == "eval" || r.op == "eval_global") && !r.payload.is_string()) {
    throw WireError(r.op + " payload must be a string");
  }
  if (r.op == "kernel_cmd" && !(r.payload.is_object() && r.payload.contains("cmd") && r.payload["cmd"].is_string())) {
    throw WireError("kernel_cmd payload must be an object with a string 'cmd'");
  }
  return r;
}

Response response_from_json(const json& j) {
  Response r;
  r.id = id_of(j);
  const json& ok = field(j, "ok");
  if (!ok.is_boolean()) throw WireError("ok must be a boolean");
  r.ok = ok.get<bool>();
  if (j.contains("result")) r.result = j["result"];
  if (j.contains("error")) {
    if (!j["error"].is_string()) throw WireError("error must be a string");
    r.error = j["error"].get<std::string>();
  }
  if (!r.ok && !r.error) throw WireError("failed response without an error");
  r.display = j.value("display", std::string("text"));
  if (r.display != "text" && r.display != "image") throw WireError("display must be text or image");
  if (j.contains("image_svg")) r.image_svg = j["image_svg"].get<std::string>();
  if (r.display == "image" && !r.image_svg) throw WireError("image response without image_svg");
  return r;
}

std::string encode_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json explode_to_json(const kernel::Environment& env, const std::vector<prover::ExplodeStep>& steps) {
  json rows = json::array();
  for (const auto& s : steps) {
    json row{{"index", s.index}, {"depth", s.depth}, {"rule", s.rule}, {"args", s.args},
             {"goal", kernel::pretty(env, s.goal)}};
    if (!s.hyp.empty()) row["hyp"] = s.hyp;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string handle_line(const std::string& line, const Handler& h) {
  Request req;
  try {
    req = request_from_json(json::parse(line));
  } catch (const json::exception& e) {
    return encode_line(to_json(Response::failure(0, std::string("WireError: ") + e.what())));
  } catch (const Error& e) {
    return encode_line(to_json(Response::failure(0, e.what())));
  }
  Response resp;
  try {
    resp = h(req);
  } catch (const Error& e) {
    resp = Response::failure(req.id, e.what());
  } catch (const std::exception& e) {
    resp = Response::failure(req.id, std::string("InternalError: ") + e.what());
  }
  resp.id = req.id;
  return encode_line(to_json(resp));
}

Address parse_address(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos) throw SyntaxError("address must be host:port, got \"" + s + "\"");
  Address a;
  if (colon > 0) a.host = s.substr(0, colon);
  std::string port = s.substr(colon + 1);
  unsigned v = 0;
  auto res = std::from_chars(port.data(), port.data() + port.size(), v);
  if (res.ec != std::errc() || res.ptr != port.data() + port.size() || v > 65535) {
    throw SyntaxError("bad port in \"" + s + "\"");
  }
  a.port = static_cast<std::uint16_t>(v);
  return a;
}

}  // namespace casbridge::link
