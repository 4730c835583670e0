#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rost/types.hpp"

namespace rost {

/// Raised when an incremental count table would go negative or disagrees with
/// a recomputation. Indicates a bug; callers are not expected to recover.
class CountCorruption : public std::logic_error {
 public:
  explicit CountCorruption(const std::string& what) : std::logic_error(what) {}
};

enum class Connectivity {
  SelfOnly,      // neighborhood of size 0: every cell is its own document
  SixConnected,  // self + 4 spatial + 2 temporal neighbors
};

/// Floor division of the spatial coordinates by cell_size; temporal width is
/// one timestep.
CellKey cell_of(const Position& pos, std::int64_t cell_size);

/// G(c): the cell itself followed by its axis neighbors. Keys with ct < 0 are
/// dropped, so SixConnected yields 7 keys for ct >= 1 and 6 at ct == 0.
std::vector<CellKey> neighborhood(const CellKey& key,
                                  Connectivity connectivity = Connectivity::SixConnected);

/// Global topic-word counts n_k^v and their per-topic totals.
class TopicCounts {
 public:
  TopicCounts(std::size_t topics, std::size_t vocab_size, double beta);

  std::size_t topics() const noexcept { return topics_; }
  std::size_t vocab_size() const noexcept { return vocab_; }
  double beta() const noexcept { return beta_; }

  std::uint32_t count(TopicId k, WordId v) const { return counts_[k * vocab_ + v]; }
  std::uint32_t total(TopicId k) const { return totals_[k]; }
  std::span<const std::uint32_t> row(TopicId k) const {
    return {counts_.data() + k * vocab_, vocab_};
  }

  void increment(TopicId k, WordId v);
  void decrement(TopicId k, WordId v);

  /// Smoothed estimate (n_k^v + beta) / (n_k + V beta).
  double phi_entry(TopicId k, WordId v) const {
    return (static_cast<double>(count(k, v)) + beta_) /
           (static_cast<double>(total(k)) + static_cast<double>(vocab_) * beta_);
  }
  std::vector<double> phi(TopicId k) const;

 private:
  std::size_t topics_;
  std::size_t vocab_;
  double beta_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> totals_;
};

struct Cell {
  CellKey key;
  std::vector<TokenId> tokens;  // insertion order
  std::vector<std::uint32_t> topic_hist;
};

/// Spacetime decomposition: cells, their topic histograms n_c^k and the
/// per-timestep membership lists M_t.
class CellGrid {
 public:
  CellGrid(std::size_t topics, std::int64_t cell_size, double alpha, Connectivity connectivity);

  std::size_t topics() const noexcept { return topics_; }
  std::int64_t cell_size() const noexcept { return cell_size_; }
  double alpha() const noexcept { return alpha_; }
  Connectivity connectivity() const noexcept { return connectivity_; }

  const std::map<CellKey, Cell>& cells() const noexcept { return cells_; }
  const Cell* find(const CellKey& key) const;
  Cell& get_or_create(const CellKey& key);
  Cell* find_mutable(const CellKey& key);

  /// M_t in ascending key order; empty for timesteps without tokens.
  std::span<const CellKey> cells_at(Timestep t) const;
  void register_timestep(Timestep t);
  std::size_t num_timesteps() const noexcept { return time_index_.size(); }

  /// Sum of topic histograms over G(key). Raw counts, no alpha.
  std::vector<std::uint32_t> neighborhood_hist(const CellKey& key) const;

 private:
  std::size_t topics_;
  std::int64_t cell_size_;
  double alpha_;
  Connectivity connectivity_;
  std::map<CellKey, Cell> cells_;
  std::vector<std::vector<CellKey>> time_index_;
};

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t topics = 16;
  double alpha = 0.1;
  double beta = 0.5;
  std::int64_t cell_size = 64;
  Connectivity connectivity = Connectivity::SixConnected;

  void validate() const;
};

/// The spatiotemporal topic model state: every observed token, the global
/// topic-word counts, and the cell grid. Single writer; const members may be
/// read concurrently while no mutation is running.
class Model {
 public:
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t topics() const noexcept { return config_.topics; }
  std::size_t vocab_size() const noexcept { return config_.vocab_size; }

  const TopicCounts& counts() const noexcept { return counts_; }
  const CellGrid& grid() const noexcept { return grid_; }
  const WordToken& token(TokenId id) const { return tokens_.at(id); }
  std::span<const WordToken> tokens() const noexcept { return tokens_; }

  /// Number of timesteps ingested so far (the next expected t).
  Timestep num_timesteps() const noexcept { return static_cast<Timestep>(grid_.num_timesteps()); }
  /// Tokens observed at timestep t, in arrival order.
  std::span<const TokenId> tokens_at(Timestep t) const;

  /// Inserts the words of timestep t as UNASSIGNED tokens. t must be the next
  /// timestep (0 for an empty model) and every word must carry pos.t == t.
  std::vector<TokenId> add_observation(Timestep t, std::span<const ObservedWord> words);

  /// Moves a token to new_topic, updating the topic-word and cell tables together.
  void reassign(TokenId id, TopicId new_topic);

  /// n_G^k for G(key), optionally excluding one assigned token inside G(key).
  std::vector<std::uint32_t> neighborhood_hist(const CellKey& key,
                                               std::optional<TokenId> exclude = std::nullopt) const;

  std::vector<double> phi(TopicId k) const { return counts_.phi(check_topic(k)); }
  /// (n_G^k + alpha) / (sum_k n_G^k + K alpha), no exclusion.
  std::vector<double> theta(const CellKey& key) const;

  CellKey cell_of(const Position& pos) const { return rost::cell_of(pos, config_.cell_size); }

  /// Recomputes every table from the token list and throws CountCorruption on
  /// any mismatch with the incremental state.
  void check_consistency() const;

 private:
  TopicId check_topic(TopicId k) const;

  ModelConfig config_;
  std::vector<WordToken> tokens_;
  std::vector<std::vector<TokenId>> tokens_by_time_;
  TopicCounts counts_;
  CellGrid grid_;
};

}  // namespace rost
