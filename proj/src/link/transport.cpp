#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "casbridge/cas/wire.hpp"
#include "casbridge/error.hpp"
#include "casbridge/link/link.hpp"

namespace casbridge::link {

namespace {

bool write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

// Buffered line reader over a socket.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  std::optional<std::string> next() {
    while (true) {
      auto nl = buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return std::nullopt;
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
};

sockaddr_in resolve(const Address& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  std::string host = addr.host == "localhost" ? "127.0.0.1" : addr.host;
  if (::inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1) return sa;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) throw LinkDown("cannot resolve " + host);
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return sa;
}

}  // namespace

// ---- server -----------------------------------------------------------------

Server::Server(Address addr, HandlerFactory factory) : addr_(std::move(addr)), factory_(std::move(factory)) {}

Server::~Server() { stop(); }

void Server::start() {
  sockaddr_in sa = resolve(addr_);
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw LinkDown(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0 || ::listen(listen_fd_, 16) != 0) {
    std::string why = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw LinkDown("cannot listen on " + addr_.host + ":" + std::to_string(addr_.port) + ": " + why);
  }
  socklen_t len = sizeof sa;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&sa), &len);
  port_ = ntohs(sa.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard<std::mutex> lock(mu_);
    if (!running_) {
      ::close(fd);
      break;
    }
    client_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { serve(fd); });
  }
}

void Server::serve(int fd) {
  Handler h;
  try {
    h = factory_();
  } catch (const std::exception& e) {
    write_all(fd, encode_line(to_json(Response::failure(0, e.what()))) + "\n");
    ::shutdown(fd, SHUT_RDWR);
    return;
  }
  LineReader reader(fd);
  while (auto line = reader.next()) {
    if (line->empty()) continue;
    if (!write_all(fd, handle_line(*line, h) + "\n")) break;
  }
  ::shutdown(fd, SHUT_RDWR);
}

void Server::stop() {
  bool was = running_.exchange(false);
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  std::lock_guard<std::mutex> lock(mu_);
  for (int fd : client_fds_) ::close(fd);
  client_fds_.clear();
  (void)was;
}

void Server::wait() {
  while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void serve_stream(std::istream& in, std::ostream& out, const Handler& h) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << handle_line(line, h) << "\n" << std::flush;
  }
}

// ---- client -----------------------------------------------------------------

std::shared_ptr<Link> Link::connect(const Address& addr) {
  sockaddr_in sa = resolve(addr);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw LinkDown(std::string("socket: ") + std::strerror(errno));
  if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
    std::string why = std::strerror(errno);
    ::close(fd);
    throw LinkDown("cannot connect to " + addr.host + ":" + std::to_string(addr.port) + ": " + why);
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  struct Conn {
    int fd;
    LineReader reader;
    explicit Conn(int f) : fd(f), reader(f) {}
    ~Conn() { ::close(fd); }
  };
  auto conn = std::make_shared<Conn>(fd);
  return std::make_shared<Link>([conn](const std::string& line) {
    if (!write_all(conn->fd, line + "\n")) throw LinkDown("connection closed while sending");
    auto reply = conn->reader.next();
    if (!reply) throw LinkDown("connection closed before a response arrived");
    return *reply;
  });
}

std::shared_ptr<Link> Link::loopback(Handler h) {
  return std::make_shared<Link>([h = std::move(h)](const std::string& line) { return handle_line(line, h); });
}

Response Link::request(const std::string& op, json payload) {
  std::lock_guard<std::mutex> lock(mu_);
  Request req{next_id_++, op, std::move(payload)};
  std::string reply = transport_(encode_line(to_json(req)));
  Response resp;
  try {
    resp = response_from_json(json::parse(reply));
  } catch (const json::exception& e) {
    throw WireError(std::string("unparseable response: ") + e.what());
  }
  if (resp.id != req.id) {
    throw WireError("response id " + std::to_string(resp.id) + " does not match request " + std::to_string(req.id));
  }
  return resp;
}

cas::Expr execute(Link& link, const std::string& code) {
  Response r = link.request("eval", code);
  if (!r.ok) throw RemoteError(r.error.value_or("unknown error"));
  return cas::from_wire(r.result);
}

tactics::CasEval remote_cas(std::shared_ptr<Link> link) {
  return [link](const std::string& source) -> cas::Expr {
    Response r;
    try {
      r = link->request("eval", source);
    } catch (const Error& e) {
      return cas::failure(e.kind(), e.detail());
    }
    if (r.ok) return cas::from_wire(r.result);
    if (!r.result.is_null()) return cas::from_wire(r.result);
    std::string err = r.error.value_or("RemoteError");
    auto colon = err.find(": ");
    if (colon == std::string::npos) return cas::failure("RemoteError", err);
    return cas::failure(err.substr(0, colon), err.substr(colon + 2));
  };
}

kernel::Expr run_command_using(Link& link, const std::string& templ, const kernel::Expr& e,
                               const std::optional<std::filesystem::path>& rules_file, const bridge::RuleRegistry& reg) {
  std::optional<std::string> aux;
  if (rules_file) {
    std::ifstream in(*rules_file);
    if (!in) throw StageError("rules: cannot read " + rules_file->string());
    std::ostringstream text;
    text << in.rdbuf();
    aux = text.str();
  }
  // Template errors surface here, before anything is sent.
  tactics::instantiate_template(templ, e, aux);
  std::shared_ptr<Link> borrowed(&link, [](Link*) {});
  return tactics::run_command_using(remote_cas(borrowed), templ, e, aux, reg);
}

}  // namespace casbridge::link
