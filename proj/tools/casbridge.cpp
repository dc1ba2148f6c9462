// casbridge: REPL, mm-block files, servers and tactic subcommands.

#include <iostream>
#include <unistd.h>

#include "CLI11.hpp"

#include "casbridge/cli/frontend.hpp"
#include "casbridge/cli/session.hpp"
#include "casbridge/error.hpp"
#include "casbridge/link/link.hpp"

using namespace casbridge;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Globals {
  std::string cas, kernel, prelude, bridge_rules, cas_rules, serve_ui;
  bool json = false;
};

cli::SessionOptions session_options(const Globals& g) {
  cli::SessionOptions o;
  if (!g.cas.empty()) o.cas = link::parse_address(g.cas);
  if (!g.kernel.empty()) o.kernel = link::parse_address(g.kernel);
  if (!g.prelude.empty()) o.env = kernel::load_declarations_file(kernel::Environment(), g.prelude);
  if (!g.bridge_rules.empty()) o.bridge_rules = std::filesystem::path(g.bridge_rules);
  if (!g.cas_rules.empty()) o.cas_rules = std::filesystem::path(g.cas_rules);
  return o;
}

int run_ui(cli::Session& s, const std::string& addr) {
  cli::UiServer ui(s, link::parse_address(addr));
  ui.start();
  std::cerr << "session endpoint on http://127.0.0.1:" << ui.port() << "\n";
  ui.wait();
  return kOk;
}

// A kernel query answered as a wire response, so --json output parses with
// the wire schema.
int run_query(const Globals& g, const std::string& verb, const std::string& rest) {
  std::string cmd;
  nlohmann::json args;
  try {
    std::tie(cmd, args) = cli::kernel_request(verb, rest);
  } catch (const SyntaxError& e) {
    std::cerr << e.detail() << "\n";
    return kUsage;
  }
  cli::Session s(session_options(g));
  link::Response resp;
  try {
    resp = link::Response::success(1, s.kernel_cmd(cmd, args));
  } catch (const RemoteError& e) {
    resp = link::Response::failure(1, e.detail());
  } catch (const Error& e) {
    resp = link::Response::failure(1, e.what());
  }
  if (g.json) {
    std::cout << link::encode_line(link::to_json(resp)) << "\n";
  } else if (resp.ok) {
    std::cout << cli::format_kernel_result(cmd, args, resp.result) << "\n";
  } else {
    std::cout << "error: " << *resp.error << "\n";
  }
  if (!resp.ok) return kFailed;
  if (cmd == "run_tactic" && args["tactic"] == "plausible" && resp.result["status"] == "countermodel") return kFailed;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bridge between a small dependently typed kernel and a rewriting CAS"};
  app.require_subcommand(0, 1);
  Globals g;
  app.add_option("--cas", g.cas, "CAS server host:port (default: in-process)");
  app.add_option("--kernel", g.kernel, "kernel server host:port (default: in-process)");
  app.add_option("--prelude", g.prelude, "declarations file used instead of the built-in prelude");
  app.add_option("--bridge-rules", g.bridge_rules, "extra `Symbol = constant` translation rules");
  app.add_option("--cas-rules", g.cas_rules, "CAS rule file loaded into the global context");
  app.add_option("--serve-ui", g.serve_ui, "serve the notebook session endpoint on host:port");
  app.add_flag("--json", g.json, "machine-readable output");

  auto* repl = app.add_subcommand("repl", "read-eval-print loop (the default)");

  std::string mm_file;
  auto* mm = app.add_subcommand("mm-block", "evaluate the mm-blocks of a file");
  mm->add_option("file", mm_file, "source file")->required();

  std::string listen = "127.0.0.1:7171";
  bool stdio = false;
  auto* serve_cas = app.add_subcommand("serve-cas", "NDJSON CAS server");
  serve_cas->add_option("--listen", listen, "host:port");
  serve_cas->add_flag("--stdio", stdio, "serve one session on stdin/stdout");
  auto* serve_kernel = app.add_subcommand("serve-kernel", "NDJSON kernel query server");
  serve_kernel->add_option("--listen", listen, "host:port");
  serve_kernel->add_flag("--stdio", stdio, "serve one session on stdin/stdout");
  auto* serve_ui = app.add_subcommand("serve-ui", "HTTP session endpoint");
  serve_ui->add_option("--listen", listen, "host:port");

  std::string arg1, arg2, tactic = "intuit";
  auto* factor = app.add_subcommand("factor", "factor a polynomial and verify by ring");
  factor->add_option("expr", arg1)->required();
  auto* linarith = app.add_subcommand("linarith", "refute `;`-separated linear hypotheses");
  linarith->add_option("hyps", arg1)->required();
  auto* lu = app.add_subcommand("lu", "LU-decompose a matrix and verify");
  lu->add_option("matrix", arg1)->required();
  auto* solve = app.add_subcommand("solve", "prove an existential by solving a polynomial system");
  solve->add_option("system", arg1)->required();
  auto* plausible = app.add_subcommand("plausible", "search for a countermodel");
  plausible->add_option("hyps", arg1)->required();
  plausible->add_option("goal", arg2)->required();
  auto* prove = app.add_subcommand("prove", "prove a CAS formula with a tactic");
  prove->add_option("formula", arg1)->required();
  prove->add_option("--tactic", tactic, "intuit, norm_num, ring or linarith");
  auto* explode = app.add_subcommand("explode", "Fitch-style listing of a declaration's proof");
  explode->add_option("decl", arg1)->required();
  auto* info = app.add_subcommand("info", "declaration kind, type and doc");
  info->add_option("decl", arg1)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*serve_cas || *serve_kernel) {
      auto cas = std::make_shared<link::CasService>();
      if (!g.cas_rules.empty()) {
        cas::Context ctx(cas->global(), cas::Context::Scope::Global);
        cas::load_rule_file(ctx, g.cas_rules);
      }
      link::HandlerFactory factory;
      if (*serve_cas) {
        factory = link::make_handler_factory(cas, nullptr);
      } else {
        cli::SessionOptions o = session_options(g);
        std::shared_ptr<link::Link> remote = o.cas ? link::Link::connect(*o.cas) : nullptr;
        kernel::Environment env = o.env;
        factory = link::make_handler_factory(nullptr, [env, remote, cas] {
          tactics::CasEval eval = remote ? link::remote_cas(remote) : tactics::local_cas(cas->global());
          return std::make_unique<link::KernelService>(env, eval);
        });
      }
      if (stdio) {
        link::serve_stream(std::cin, std::cout, factory());
        return kOk;
      }
      link::Server server(link::parse_address(listen), factory);
      server.start();
      std::cerr << "listening on " << link::parse_address(listen).host << ":" << server.port() << "\n";
      server.wait();
      return kOk;
    }
    if (*factor) return run_query(g, "factor", arg1);
    if (*linarith) return run_query(g, "linarith", arg1);
    if (*lu) return run_query(g, "lu", arg1);
    if (*solve) return run_query(g, "solve", arg1);
    if (*plausible) return run_query(g, "plausible", arg1 + " |- " + arg2);
    if (*prove) return run_query(g, "prove", tactic + " " + arg1);
    if (*explode) return run_query(g, "explode", arg1);
    if (*info) return run_query(g, "info", arg1);

    cli::Session session(session_options(g));
    if (*serve_ui) return run_ui(session, listen);
    if (!g.serve_ui.empty()) return run_ui(session, g.serve_ui);
    if (*mm) return cli::run_mm_file(session, mm_file, std::cout, g.json) ? kFailed : kOk;
    (void)repl;
    bool tty = isatty(STDIN_FILENO);
    cli::run_repl(session, std::cin, std::cout, g.json, ".", tty ? "mm> " : "");
    return kOk;
  } catch (const SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kFailed;
  }
}
