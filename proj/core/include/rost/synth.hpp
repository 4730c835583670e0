#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "rost/types.hpp"

namespace rost {

/// Ground-truth generative model for synthetic streams: planted topic-word
/// distributions and a topic mixture for every cell of a bounded spacetime box.
struct PlantedModel {
  std::size_t topics = 0;
  std::size_t vocab_size = 0;
  std::vector<std::vector<double>> phi_true;  // topics x vocab, rows sum to 1
  std::map<CellKey, std::vector<double>> theta_field;
  std::size_t words_per_step = 50;
  std::int64_t extent = 4;  // spatial width and height, in cells
  std::int64_t steps = 0;
  std::int64_t cell_size = 64;
  std::uint64_t seed = 0;
};

struct SeparableOptions {
  std::size_t topics = 8;
  std::size_t vocab_size = 100;
  std::int64_t extent = 4;
  std::int64_t steps = 200;
  double smoothness = 0.5;
  std::uint64_t seed = 0;
  std::size_t words_per_step = 50;
  std::int64_t cell_size = 64;
};

/// Block-diagonal topics (topic k owns words [k s, (k+1) s) with s = V / K,
/// uniform inside its block) and a cell mixture field
///
///   theta_c = softmax_k( 4 * smoothness * sin(wx_k cx + wy_k cy + wt_k ct + phase_k) )
///
/// with low random frequencies, so neighboring cells carry similar mixtures.
/// smoothness = 0 gives every cell the same uniform mixture.
/// Throws std::invalid_argument when V < K.
PlantedModel make_separable(const SeparableOptions& options);

struct SyntheticStream {
  Stream stream;
  std::vector<std::vector<TopicId>> labels;  // aligned with stream[t].words
};

/// Runs the forward model: for each timestep, words_per_step tokens at uniform
/// positions inside the extent; z ~ theta of the token's cell, w ~ phi_true[z].
SyntheticStream generate(const PlantedModel& model);

/// Topic owning word v in a block-diagonal model (the slice index).
TopicId owning_topic(const PlantedModel& model, WordId v);

}  // namespace rost
