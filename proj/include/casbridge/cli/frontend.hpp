#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "casbridge/cli/session.hpp"
#include "casbridge/link/link.hpp"

namespace httplib {
class Server;
}

namespace casbridge::cli {

/// One line of output for a result: the output text, or `error: ` and the
/// text when the command failed. With `as_json` the CellResult JSON.
std::string format_result(const CellResult& r, bool as_json);

/// Read commands from `in` until EOF or `:quit`. A line starting with `:`
/// is a kernel query (`:info id_prop`); anything else is a CAS command in
/// a singleton block. Images go to `image_dir`/repl-N.svg. Returns the
/// number of failed commands.
std::size_t run_repl(Session& s, std::istream& in, std::ostream& out, bool as_json = false,
                     const std::filesystem::path& image_dir = ".", const std::string& prompt = "");

/// Evaluate every mm-block of `file`, printing one result per command.
/// Returns the number of failed commands. Throws SyntaxError for a
/// malformed file.
std::size_t run_mm_file(Session& s, const std::filesystem::path& file, std::ostream& out, bool as_json = false);

/// HTTP endpoint for notebook front ends:
///   POST /session/cell {source, mode} -> CellResult JSON
///   GET  /session/state               -> Session::state()
/// Cells run one at a time.
class UiServer {
 public:
  UiServer(Session& session, link::Address addr);
  ~UiServer();
  UiServer(const UiServer&) = delete;
  UiServer& operator=(const UiServer&) = delete;

  /// Binds and serves on a background thread. Throws LinkDown.
  void start();
  void stop();
  /// Blocks until stop().
  void wait();
  std::uint16_t port() const { return port_; }

 private:
  Session& session_;
  link::Address addr_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  std::mutex cell_mu_;
  std::uint16_t port_ = 0;
};

}  // namespace casbridge::cli
