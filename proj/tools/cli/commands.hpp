#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rost/eval.hpp"
#include "rost/pipeline.hpp"
#include "rost/scheduler.hpp"
#include "rost/types.hpp"

namespace rost::cli {

struct CliConfig {
  std::string subcommand;
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path ratios_output;  // compare only; defaults next to --output
  std::size_t topics = 16;
  double alpha = 0.1;
  double beta = 0.5;
  std::int64_t cell_size = 64;
  std::string scheduler;
  double eta = 0.5;
  double q = 0.5;
  std::optional<std::uint64_t> budget_rounds;
  std::optional<std::uint64_t> budget_millis;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  // synth
  std::size_t vocab = 100;
  std::int64_t steps = 200;
  std::size_t words_per_step = 50;
  double smoothness = 0.5;
  std::int64_t extent = 4;
};

struct CompareOptions {
  GibbsParams params;  // params.seed is the master seed; restart i uses seed + i
  std::int64_t cell_size = 64;
  double q = 0.5;
  double eta = 0.5;
  Budget budget = Budget::rounds(10);
  std::size_t restarts = 1;
  std::size_t threads = 1;
};

/// Every scheduler plus the batch baseline on one stream, averaged over
/// restarts. Output does not depend on the thread count.
ComparisonTable run_comparison(const Stream& stream, std::size_t vocab_size,
                               const CompareOptions& options);

int cmd_run(const CliConfig& config, std::ostream& err);
int cmd_batch(const CliConfig& config, std::ostream& err);
int cmd_compare(const CliConfig& config, std::ostream& err);
int cmd_synth(const CliConfig& config, std::ostream& err);

/// Parses argv (including the program name) and dispatches. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rost::cli
