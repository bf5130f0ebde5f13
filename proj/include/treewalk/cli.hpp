#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treewalk/tdlc.hpp"

namespace treewalk::cli {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct WalkParams {
  Index n = 20000;
  std::size_t trials = 200;
  Index depth = 20;
};

struct HittingParams {
  Index n = 20000;
  std::size_t trials = 2000;
  Index depth = 8;
};

struct CosetParams {
  std::uint32_t q = 2;
  Index m = 1;
  Index j_min = -2, j_max = 2;
  Index depth = 0;
  Index tidy_window = 6;
};

/// Parsed JSON run configuration. See docs/config.md for the schema.
struct RunConfig {
  std::vector<std::uint32_t> moduli;
  std::optional<std::uint64_t> master_seed;
  std::optional<Measure> measure;
  std::vector<ProductElem> generators; ///< classify input; defaults to the measure support
  std::size_t sample_bound = 4;
  std::vector<ProductElem> scale_elements;
  Index oracle_depth = 0; ///< 0 means |n| + 2 per element
  WalkParams walk;
  HittingParams hitting;
  CosetParams coset;
};

RunConfig parse_config(const std::string &json_text);
RunConfig load_config(const std::filesystem::path &path);

struct Options {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  unsigned threads = 1;
};

enum ExitCode : int { ok = 0, config_error = 1, hypothesis_failure = 2 };

/// Runs one subcommand (walk, hitting, classify, scale, coset-tree) and
/// returns its exit code. Diagnostics go to `err`, a summary to `log`.
int run_command(const std::string &name, const Options &options, std::ostream &log, std::ostream &err);

} // namespace treewalk::cli
