#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rost/eval.hpp"
#include "rost/model.hpp"
#include "rost/random.hpp"
#include "rost/sampler.hpp"
#include "rost/scheduler.hpp"

namespace rost {

/// Refinement effort available between two observations: a fixed number of
/// rounds, or a wall-clock window T_R. A round refines every cell of one
/// sampled timestep.
struct Budget {
  enum class Mode { Rounds, WallClock };

  Mode mode = Mode::Rounds;
  std::uint64_t rounds_per_interval = 0;
  std::uint64_t millis_per_interval = 0;

  static Budget rounds(std::uint64_t r) { return {Mode::Rounds, r, 0}; }
  static Budget millis(std::uint64_t ms) { return {Mode::WallClock, 0, ms}; }

  /// R for Rounds mode, T_R for WallClock mode.
  std::uint64_t amount() const noexcept {
    return mode == Mode::Rounds ? rounds_per_interval : millis_per_interval;
  }
};

/// r(t) and word refinements per 0-indexed timestep.
struct RefinementLedger {
  std::vector<std::uint64_t> r;
  std::vector<std::uint64_t> words_refined;

  std::uint64_t total_rounds() const;
  void record(Timestep t, std::uint64_t words);
};

struct StepReport {
  Timestep t = 0;
  std::uint64_t rounds = 0;
  std::uint64_t words_refined = 0;
  /// Perplexity of timestep t-1, measured before this observation was
  /// ingested. Empty for the first step or when t-1 held no words.
  std::optional<double> previous_instant_ppx;
};

struct RunConfig {
  GibbsParams params;
  std::int64_t cell_size = 64;
  SchedulerKind scheduler;
  Budget budget = Budget::rounds(10);
};

/// Online refinement: ingest an observation, give its words uniform labels,
/// then spend one budget window refining timesteps drawn from the scheduler.
class RealtimeSampler {
 public:
  using RoundObserver = std::function<void(Timestep)>;

  RealtimeSampler(std::size_t vocab_size, const RunConfig& config);

  StepReport step(const Observation& observation);

  /// One budget window at the current time. Returns the rounds executed.
  std::uint64_t refine_window();

  /// Called with the 0-indexed timestep of every round, before it is refined.
  void set_round_observer(RoundObserver observer) { observer_ = std::move(observer); }

  const Model& model() const noexcept { return model_; }
  const RefinementLedger& ledger() const noexcept { return ledger_; }
  std::uint64_t words_refined() const noexcept { return words_refined_; }

 private:
  std::uint64_t run_round();

  RunConfig config_;
  Model model_;
  Rng rng_;
  RefinementLedger ledger_;
  std::uint64_t words_refined_ = 0;
  RoundObserver observer_;
};

struct TimestepRecord {
  Timestep t = 0;
  std::size_t n_words = 0;
  std::optional<double> instant_ppx;
  std::optional<double> final_ppx;
  std::uint64_t r_t = 0;
  std::uint64_t words_refined = 0;
};

struct RunReport {
  std::vector<TimestepRecord> timesteps;
  std::optional<double> final_ppx;
  RefinementLedger ledger;
  std::uint64_t rounds_executed = 0;
  std::uint64_t words_refined = 0;
};

/// Streams every observation through a RealtimeSampler, then runs one
/// trailing window so the last observation also gets a refinement interval.
/// The last observation's instantaneous perplexity is measured after that
/// window. Timesteps must be 0, 1, 2, ...
RunReport run_stream(const Stream& stream, std::size_t vocab_size, const RunConfig& config,
                     RealtimeSampler::RoundObserver observer = {});

/// Stopping rule for the batch baseline: sweep until the cumulative word
/// refinements reach `word_refinements`, or until `total_millis` has elapsed
/// (at least one sweep).
struct BatchBudget {
  std::optional<std::uint64_t> word_refinements;
  std::optional<std::uint64_t> total_millis;
};

/// Batch effort equivalent to an online run of `stream` under `budget`,
/// including the trailing window: R (n+1) rounds of mean-sized timesteps, or
/// T_R (n+1) milliseconds.
BatchBudget equivalent_batch_budget(const Stream& stream, const Budget& budget);

/// Ingests the whole stream, initializes every label, then runs batch sweeps
/// until the budget is met. Per-timestep entries are scored with the final
/// model; r_t counts full sweeps.
RunReport run_batch_baseline(const Stream& stream, std::size_t vocab_size,
                             const GibbsParams& params, std::int64_t cell_size,
                             const BatchBudget& budget);

PerplexityTrace to_trace(const RunReport& report);

}  // namespace rost
