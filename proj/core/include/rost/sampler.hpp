#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rost/model.hpp"
#include "rost/random.hpp"

namespace rost {

/// Dirichlet hyperparameters, topic count and generator seed. Defaults are the
/// settings used for video streams (alpha=0.1, beta=0.5, K=16).
struct GibbsParams {
  double alpha = 0.1;
  double beta = 0.5;
  std::size_t topics = 16;
  std::uint64_t seed = 0;

  void validate() const;
  ModelConfig model_config(std::size_t vocab_size, std::int64_t cell_size = 64) const;
};

/// Collapsed Gibbs conditional for one token, normalized to sum to 1.
///
///   p(k) ∝ (n_{k,-i}^v + beta) / (n_{k,-i} + V beta)
///        * (n_{G,-i}^k + alpha) / (n_{G,-i} + K alpha)
///
/// An assigned token is excluded from both count tables; an UNASSIGNED token
/// is not counted anywhere, so nothing is excluded.
std::vector<double> posterior(const Model& model, TokenId token);

/// Draws an index from unnormalized non-negative weights by cumulative-sum
/// inversion with a single uniform.
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);

/// Gives each UNASSIGNED token an independent uniform topic. Throws
/// std::logic_error if any token is already labelled.
void init_labels(Model& model, std::span<const TokenId> tokens, Rng& rng);

/// Resamples one assigned token from its conditional and returns the new topic.
TopicId refine_word(Model& model, TokenId token, Rng& rng);

/// Resamples every token of a cell in insertion order. Returns the number of
/// tokens refined (0 for a cell that does not exist).
std::size_t refine_cell(Model& model, const CellKey& key, Rng& rng);

/// Full sweeps over every cell in (ct, cy, cx) order. Returns words refined.
std::uint64_t batch_gibbs(Model& model, std::size_t n_sweeps, Rng& rng);

}  // namespace rost
