#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rost/model.hpp"

namespace rost {

/// exp(-mean log p(w_i | x_i)) with the marginal predictive
/// p(w | x) = sum_k phi_k(w) theta_{c(x)}(k), scored against the current model
/// state with no self-exclusion. Throws std::invalid_argument on an empty set.
double perplexity(const Model& model, std::span<const TokenId> tokens);

/// Perplexity of exactly the tokens observed at timestep t.
/// Throws std::out_of_range for a timestep that has not been ingested and
/// std::invalid_argument when it holds no tokens.
double instantaneous_ppx(const Model& model, Timestep t);

/// Normalized mutual information I(A;B) / sqrt(H(A) H(B)) in [0, 1].
/// Two constant labelings score 1; a constant against a non-constant one scores 0.
double nmi(std::span<const TopicId> labels_a, std::span<const TopicId> labels_b);

using TimeSeries = std::vector<std::pair<Timestep, double>>;

struct PerplexityTrace {
  TimeSeries instant;     // one step after arrival
  TimeSeries final_by_t;  // every timestep re-scored with the end-of-stream model
  double final_ppx = 0.0; // all words at end of stream
  std::optional<TimeSeries> batch_ratio_instant;
  std::optional<double> batch_ratio_final;
};

/// Pointwise mean over restarts. All traces must cover the same timesteps.
PerplexityTrace mean_trace(std::span<const PerplexityTrace> traces);

struct ComparisonRow {
  std::string scheduler;
  double budget = 0.0;  // R (rounds) or T_R (milliseconds)
  double mean_instant_ppx = 0.0;
  double mean_final_ppx = 0.0;
  double instant_ratio = 1.0;
  double final_ratio = 1.0;
};

struct RatioPoint {
  Timestep t = 0;
  double instant_ratio = 0.0;
  double final_ratio = 0.0;
};

struct RatioSeries {
  std::string scheduler;
  std::vector<RatioPoint> points;
};

/// Scheduler rows in input order followed by a `batch` row, plus per-timestep
/// ratio series against the batch trace.
struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<RatioSeries> per_timestep;

  const ComparisonRow* find(std::string_view scheduler) const;
};

/// Means are arithmetic over timesteps. Throws std::invalid_argument when a
/// trace covers different timesteps than the batch trace.
ComparisonTable compare_report(const std::vector<std::pair<std::string, PerplexityTrace>>& traces,
                               const PerplexityTrace& batch, double budget);

}  // namespace rost
