#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "casbridge/bridge/translate.hpp"
#include "casbridge/cas/engine.hpp"
#include "casbridge/kernel/environment.hpp"
#include "casbridge/link/link.hpp"

namespace casbridge::cli {

using json = nlohmann::json;

// ---- mm-blocks ------------------------------------------------------------

struct MmCommand {
  std::string source;
  bool image = false;
  /// 1-based line of the command's first character in the file.
  std::size_t line = 0;
};

struct MmBlock {
  std::vector<std::string> unfolding;
  std::vector<MmCommand> commands;
  std::size_t line = 0;
};

/// Every `begin_mm_block` ... `end_mm_block` region of `text`. Text outside
/// the blocks is ignored. Throws SyntaxError on nested or unterminated
/// blocks. See docs/mm-blocks.md for the grammar.
std::vector<MmBlock> parse_mm_blocks(std::string_view text);

/// Split one command off an optional leading `as image`.
MmCommand parse_command(std::string_view src);

// ---- antiquotation --------------------------------------------------------

/// Replace each `"..."` segment of `src` by the CAS form of the kernel term
/// it denotes: parsed in surface syntax against `env` (free identifiers are
/// real variables shared by all segments of the command), elaborated, with
/// the `unfolding` definitions expanded, and spliced as
/// `Activate[LeanConvert[<reflection>]]`. `\"` is a literal quote. A
/// command that is a single quoted string is a plain CAS command and loses
/// its outer quotes. Throws SyntaxError or the elaborator's error.
std::string expand_antiquotes(std::string_view src, const kernel::Environment& env,
                              const std::vector<std::string>& unfolding = {});

// ---- sessions ---------------------------------------------------------------

struct CellResult {
  bool ok = false;
  /// Pretty-printed kernel term, CAS surface syntax, or the error text.
  std::string output;
  /// "text", "image" or "explode".
  std::string display = "text";
  std::optional<std::string> image_svg;
  std::optional<json> explode;
  /// Wire form of the CAS result, when there is one.
  std::optional<json> result;

  json to_json() const;
};

struct SessionOptions {
  /// Remote endpoints; in-process engines are used when absent.
  std::optional<link::Address> cas;
  std::optional<link::Address> kernel;
  kernel::Environment env = kernel::prelude();
  std::optional<std::filesystem::path> bridge_rules;
  std::optional<std::filesystem::path> cas_rules;
};

/// One user session. In-process blocks share one CAS context per block;
/// through a remote CAS every command gets a fresh context. Not thread
/// safe; the HTTP endpoint serializes calls.
class Session {
 public:
  explicit Session(SessionOptions opts = {});

  /// A command in a singleton block.
  CellResult run_command(const std::string& src);
  /// Commands in order, one result each; a failing command does not stop
  /// the block. Images are written next to `source_file` when given.
  std::vector<CellResult> run_block(const MmBlock& block,
                                    const std::optional<std::filesystem::path>& source_file = std::nullopt,
                                    std::size_t block_index = 0);
  /// A kernel query: `info N`, `explode N`, `prove T F`, `factor E`,
  /// `linarith H; H`, `lu M`, `solve G`, `plausible H; H |- G`,
  /// `axiomatize N S`, `approx N E [digits]`.
  CellResult run_kernel(const std::string& src);

  /// A notebook cell: mode "cas", "cas-image" or "kernel". Recorded in the
  /// history returned by state().
  CellResult run_cell(const std::string& source, const std::string& mode);
  json state() const;

  /// Send a kernel command; throws the error carried by a failed response.
  json kernel_cmd(const std::string& cmd, const json& args);

  const kernel::Environment& env() const { return env_; }
  const bridge::RuleRegistry& registry() const { return reg_; }

 private:
  class BlockContext;
  CellResult run_in(BlockContext& ctx, const MmCommand& cmd, const std::vector<std::string>& unfolding);
  CellResult present(const link::Response& r) const;

  SessionOptions opts_;
  kernel::Environment env_;
  bridge::RuleRegistry reg_;
  std::shared_ptr<cas::GlobalContext> global_;
  std::shared_ptr<link::Link> cas_link_;
  std::shared_ptr<link::Link> kernel_link_;
  std::unique_ptr<link::KernelService> kernel_;
  std::optional<std::string> cas_rules_text_;
  json history_ = json::array();
};

/// Parse the argument of a kernel query into the kernel_cmd {cmd, args}
/// pair. Throws SyntaxError.
std::pair<std::string, json> kernel_request(const std::string& verb, const std::string& rest);

/// Human-readable rendering of a kernel_cmd result.
std::string format_kernel_result(const std::string& cmd, const json& args, const json& result);

/// Integer vector proportional to `coeffs` with gcd 1.
std::vector<std::string> primitive_certificate(const std::vector<std::string>& coeffs);

}  // namespace casbridge::cli
