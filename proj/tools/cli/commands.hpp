#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tsvdtd/experiments.hpp"

namespace tsvdtd::cli {

/// Flat option bag shared by all subcommands. Each subcommand starts from
/// its own defaults; values then come from the config file and finally from
/// command-line flags (flags win).
struct CliConfig {
  int states = 200;
  int tasks = 40;
  int rank = 8;
  int trunc_k = 9;
  double gamma = 0.95;
  int iters = 5000;
  int trials = 5;
  std::uint64_t seed = 1;
  std::string schedule = "simple";  // "theory" | "simple"
  double noise = 0.0;
  std::string algos = "tsvd,td,feature-td";
  std::string ranks = "2,6,10,14,18,22,26,30";
  std::string out = "out";
};

/// Parses a flat `key = value` config file (`#` starts a comment). Keys are
/// the long flag names without dashes. Throws std::invalid_argument on
/// unknown keys or malformed lines.
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

/// Applies one config-file entry onto the bag. Throws std::invalid_argument
/// for unknown keys or unparsable values.
void apply_config_entry(CliConfig& config, const std::string& key, const std::string& value);

/// Translation to the experiment layer (validates schedule/algos spellings).
RunConfig to_run_config(const CliConfig& config);
std::vector<int> parse_rank_list(const std::string& ranks);

int run_generate(const CliConfig& config);
int run_run(const CliConfig& config);
int run_sweep(const CliConfig& config);
int run_verify(const CliConfig& config);

/// Full dispatch: subcommands generate | run | sweep | verify.
/// Exit codes: 0 success, 1 validation error, 2 divergence abort,
/// 3 verification failure.
int cli_main(int argc, const char* const* argv);

}  // namespace tsvdtd::cli
