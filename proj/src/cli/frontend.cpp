#include "casbridge/cli/frontend.hpp"

#include <fstream>
#include <sstream>

#include "httplib.h"

#include "casbridge/error.hpp"

namespace casbridge::cli {

std::string format_result(const CellResult& r, bool as_json) {
  if (as_json) return r.to_json().dump();
  return r.ok ? r.output : "error: " + r.output;
}

std::size_t run_repl(Session& s, std::istream& in, std::ostream& out, bool as_json,
                     const std::filesystem::path& image_dir, const std::string& prompt) {
  std::size_t failures = 0, images = 0;
  out << prompt << std::flush;
  for (std::string line; std::getline(in, line); out << prompt << std::flush) {
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    line = line.substr(b);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line == ":quit" || line == ":q") break;
    CellResult r = line[0] == ':' ? s.run_kernel(line.substr(1)) : s.run_command(line);
    if (r.ok && r.image_svg) {
      std::filesystem::path p = image_dir / ("repl-" + std::to_string(++images) + ".svg");
      std::ofstream f(p);
      f << *r.image_svg;
      if (f) {
        r.output = p.string();
      } else {
        r.ok = false;
        r.output = "image: cannot write " + p.string();
      }
    }
    if (!r.ok) ++failures;
    out << format_result(r, as_json) << "\n";
  }
  return failures;
}

std::size_t run_mm_file(Session& s, const std::filesystem::path& file, std::ostream& out, bool as_json) {
  std::ifstream f(file);
  if (!f) throw SyntaxError("cannot read " + file.string());
  std::stringstream buf;
  buf << f.rdbuf();
  std::vector<MmBlock> blocks = parse_mm_blocks(buf.str());
  std::size_t failures = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto results = s.run_block(blocks[i], file, i);
    for (const auto& r : results) {
      if (!r.ok) ++failures;
      out << format_result(r, as_json) << "\n";
    }
  }
  return failures;
}

UiServer::UiServer(Session& session, link::Address addr)
    : session_(session), addr_(std::move(addr)), http_(std::make_unique<httplib::Server>()) {
  auto reply = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  http_->Post("/session/cell", [this, reply](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("source") || !body["source"].is_string()) {
      reply(res, 400, {{"error", "expected {\"source\": string, \"mode\": string}"}});
      return;
    }
    std::string mode = body.value("mode", std::string("cas"));
    if (!body.value("mode", json("cas")).is_string()) {
      reply(res, 400, {{"error", "mode must be a string"}});
      return;
    }
    std::lock_guard<std::mutex> lock(cell_mu_);
    reply(res, 200, session_.run_cell(body["source"].get<std::string>(), mode).to_json());
  });
  http_->Get("/session/state", [this, reply](const httplib::Request&, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(cell_mu_);
    reply(res, 200, session_.state());
  });
}

UiServer::~UiServer() { stop(); }

void UiServer::start() {
  int port = addr_.port == 0 ? http_->bind_to_any_port(addr_.host) : (http_->bind_to_port(addr_.host, addr_.port) ? addr_.port : -1);
  if (port <= 0) throw LinkDown("cannot bind " + addr_.host + ":" + std::to_string(addr_.port));
  port_ = static_cast<std::uint16_t>(port);
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
}

void UiServer::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

void UiServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace casbridge::cli
