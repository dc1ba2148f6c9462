#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "casbridge/bridge/translate.hpp"
#include "casbridge/cas/engine.hpp"
#include "casbridge/kernel/environment.hpp"
#include "casbridge/prover/prover.hpp"
#include "casbridge/tactics/cas_eval.hpp"

namespace casbridge::link {

using json = nlohmann::json;

// ---- messages -------------------------------------------------------------

struct Request {
  std::uint64_t id = 0;
  /// "eval", "eval_global" or "kernel_cmd".
  std::string op;
  /// Surface syntax for eval ops; {cmd, args} for kernel_cmd.
  json payload;
};

struct Response {
  std::uint64_t id = 0;
  bool ok = false;
  json result;
  std::optional<std::string> error;
  /// "text" or "image".
  std::string display = "text";
  std::optional<std::string> image_svg;

  static Response success(std::uint64_t id, json result);
  static Response failure(std::uint64_t id, std::string error);
};

json to_json(const Request& r);
json to_json(const Response& r);
/// Throw WireError on missing or mistyped fields.
Request request_from_json(const json& j);
Response response_from_json(const json& j);

/// One line, no trailing newline. Keys are sorted, so equal messages give
/// equal bytes.
std::string encode_line(const json& j);

json explode_to_json(const kernel::Environment& env, const std::vector<prover::ExplodeStep>& steps);

using Handler = std::function<Response(const Request&)>;

/// Decode one request line, run `h`, encode the response. Malformed lines
/// get an error response with id 0.
std::string handle_line(const std::string& line, const Handler& h);

// ---- services -------------------------------------------------------------

/// The CAS evaluation service. `eval` runs in a fresh context that is
/// dropped afterwards; `eval_global` runs in the shared global context.
/// A payload starting with `as image` must evaluate to Graphics[svg].
class CasService {
 public:
  explicit CasService(std::shared_ptr<cas::GlobalContext> global = cas::make_default_global());
  Response handle(const Request& r);
  const std::shared_ptr<cas::GlobalContext>& global() const { return global_; }

  /// Parse and evaluate `src` in `ctx`, with the same response shape as an
  /// eval request.
  static Response evaluate(cas::Context& ctx, std::uint64_t id, std::string src);

 private:
  std::shared_ptr<cas::GlobalContext> global_;
  std::mutex global_mu_;
};

/// Kernel queries for one connection. The environment starts from `env`
/// and grows only through `axiomatize`.
class KernelService {
 public:
  KernelService(kernel::Environment env, tactics::CasEval eval);
  Response handle(const Request& r);
  const kernel::Environment& env() const { return env_; }

 private:
  json dispatch(const std::string& cmd, const json& args);
  json run_tactic(const json& args);

  kernel::Environment env_;
  tactics::CasEval eval_;
};

/// Routes eval ops to `cas` and kernel_cmd to a fresh KernelService made by
/// `kernel` (either may be null, which rejects that op).
using HandlerFactory = std::function<Handler()>;
HandlerFactory make_handler_factory(std::shared_ptr<CasService> cas,
                                    std::function<std::unique_ptr<KernelService>()> kernel);

// ---- transport ------------------------------------------------------------

struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// "host:port" or ":port". Throws SyntaxError.
Address parse_address(const std::string& s);

/// NDJSON over TCP. One thread per connection, each with its own handler
/// from the factory; requests on a connection run strictly in order.
class Server {
 public:
  Server(Address addr, HandlerFactory factory);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Throws LinkDown when the address cannot be
  /// bound.
  void start();
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();
  /// The bound port (useful with port 0).
  std::uint16_t port() const { return port_; }

 private:
  void accept_loop();
  void serve(int fd);

  Address addr_;
  HandlerFactory factory_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::vector<std::thread> workers_;
  std::vector<int> client_fds_;
};

/// Stdio mode: one request per input line, one response per output line,
/// until EOF.
void serve_stream(std::istream& in, std::ostream& out, const Handler& h);

// ---- client ---------------------------------------------------------------

/// Sends one encoded line and returns the reply line.
using Transport = std::function<std::string(const std::string& line)>;

class Link {
 public:
  explicit Link(Transport t) : transport_(std::move(t)) {}

  /// TCP connection. Throws LinkDown.
  static std::shared_ptr<Link> connect(const Address& addr);
  /// In-process link to a handler; no sockets.
  static std::shared_ptr<Link> loopback(Handler h);

  /// Assigns the next id and checks that the reply echoes it. Throws
  /// LinkDown or WireError.
  Response request(const std::string& op, json payload);

 private:
  Transport transport_;
  std::uint64_t next_id_ = 1;
  std::mutex mu_;
};

/// Evaluate `code` in a fresh remote context. Throws RemoteError.
cas::Expr execute(Link& link, const std::string& code);

/// A CasEval backed by `link`; failures come back as Failure[...].
tactics::CasEval remote_cas(std::shared_ptr<Link> link);

/// run_command_using over the link, optionally loading `rules_file` into
/// the request's context first.
kernel::Expr run_command_using(Link& link, const std::string& templ, const kernel::Expr& e,
                               const std::optional<std::filesystem::path>& rules_file = std::nullopt,
                               const bridge::RuleRegistry& reg = bridge::prelude_registry());

}  // namespace casbridge::link
