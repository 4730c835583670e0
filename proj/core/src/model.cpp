#include "rost/model.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <sstream>

namespace rost {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string key_string(const CellKey& key) {
  std::ostringstream out;
  out << "(" << key.cx << "," << key.cy << "," << key.ct << ")";
  return out.str();
}

}  // namespace

CellKey cell_of(const Position& pos, std::int64_t cell_size) {
  if (cell_size <= 0) throw std::invalid_argument("cell_size must be positive");
  return CellKey{floor_div(pos.x, cell_size), floor_div(pos.y, cell_size), pos.t};
}

std::vector<CellKey> neighborhood(const CellKey& key, Connectivity connectivity) {
  std::vector<CellKey> out{key};
  if (connectivity == Connectivity::SelfOnly) return out;
  out.reserve(7);
  out.push_back({key.cx - 1, key.cy, key.ct});
  out.push_back({key.cx + 1, key.cy, key.ct});
  out.push_back({key.cx, key.cy - 1, key.ct});
  out.push_back({key.cx, key.cy + 1, key.ct});
  if (key.ct >= 1) out.push_back({key.cx, key.cy, key.ct - 1});
  out.push_back({key.cx, key.cy, key.ct + 1});
  return out;
}

// ---------------------------------------------------------------------------

TopicCounts::TopicCounts(std::size_t topics, std::size_t vocab_size, double beta)
    : topics_(topics), vocab_(vocab_size), beta_(beta),
      counts_(topics * vocab_size, 0), totals_(topics, 0) {}

void TopicCounts::increment(TopicId k, WordId v) {
  auto& c = counts_[k * vocab_ + v];
  assert(c < std::numeric_limits<std::uint32_t>::max());
  ++c;
  ++totals_[k];
}

void TopicCounts::decrement(TopicId k, WordId v) {
  auto& c = counts_[k * vocab_ + v];
  if (c == 0 || totals_[k] == 0) {
    throw CountCorruption("topic-word count underflow at topic " + std::to_string(k) +
                          ", word " + std::to_string(v));
  }
  --c;
  --totals_[k];
}

std::vector<double> TopicCounts::phi(TopicId k) const {
  std::vector<double> out(vocab_);
  for (std::size_t v = 0; v < vocab_; ++v) out[v] = phi_entry(k, static_cast<WordId>(v));
  return out;
}

// ---------------------------------------------------------------------------

CellGrid::CellGrid(std::size_t topics, std::int64_t cell_size, double alpha,
                   Connectivity connectivity)
    : topics_(topics), cell_size_(cell_size), alpha_(alpha), connectivity_(connectivity) {}

const Cell* CellGrid::find(const CellKey& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

Cell* CellGrid::find_mutable(const CellKey& key) {
  auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

Cell& CellGrid::get_or_create(const CellKey& key) {
  auto [it, inserted] = cells_.try_emplace(key);
  if (inserted) {
    it->second.key = key;
    it->second.topic_hist.assign(topics_, 0);
    auto& members = time_index_.at(static_cast<std::size_t>(key.ct));
    members.insert(std::lower_bound(members.begin(), members.end(), key), key);
  }
  return it->second;
}

std::span<const CellKey> CellGrid::cells_at(Timestep t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= time_index_.size()) return {};
  return time_index_[static_cast<std::size_t>(t)];
}

void CellGrid::register_timestep(Timestep t) {
  if (t < 0) throw std::invalid_argument("negative timestep");
  if (static_cast<std::size_t>(t) >= time_index_.size()) {
    time_index_.resize(static_cast<std::size_t>(t) + 1);
  }
}

std::vector<std::uint32_t> CellGrid::neighborhood_hist(const CellKey& key) const {
  std::vector<std::uint32_t> hist(topics_, 0);
  for (const auto& nb : neighborhood(key, connectivity_)) {
    if (const Cell* cell = find(nb)) {
      for (std::size_t k = 0; k < topics_; ++k) hist[k] += cell->topic_hist[k];
    }
  }
  return hist;
}

// ---------------------------------------------------------------------------

void ModelConfig::validate() const {
  if (vocab_size == 0) throw std::invalid_argument("vocabulary size must be positive");
  if (topics == 0) throw std::invalid_argument("topic count must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (cell_size <= 0) throw std::invalid_argument("cell size must be positive");
}

Model::Model(const ModelConfig& config)
    : config_((config.validate(), config)),
      counts_(config.topics, config.vocab_size, config.beta),
      grid_(config.topics, config.cell_size, config.alpha, config.connectivity) {}

TopicId Model::check_topic(TopicId k) const {
  if (k >= config_.topics) throw std::out_of_range("topic index out of range");
  return k;
}

std::span<const TokenId> Model::tokens_at(Timestep t) const {
  if (t < 0 || t >= num_timesteps()) return {};
  return tokens_by_time_[static_cast<std::size_t>(t)];
}

std::vector<TokenId> Model::add_observation(Timestep t, std::span<const ObservedWord> words) {
  if (t != num_timesteps()) {
    throw std::invalid_argument("out-of-order observation: expected t=" +
                                std::to_string(num_timesteps()) + ", got t=" + std::to_string(t));
  }
  for (const auto& w : words) {
    if (w.word >= config_.vocab_size) {
      throw std::invalid_argument("word index " + std::to_string(w.word) +
                                  " outside vocabulary of size " +
                                  std::to_string(config_.vocab_size));
    }
    if (w.pos.t != t) {
      throw std::invalid_argument("word position t=" + std::to_string(w.pos.t) +
                                  " does not match observation t=" + std::to_string(t));
    }
  }

  grid_.register_timestep(t);
  tokens_by_time_.emplace_back();
  auto& at_t = tokens_by_time_.back();

  std::vector<TokenId> ids;
  ids.reserve(words.size());
  for (const auto& w : words) {
    const TokenId id = tokens_.size();
    tokens_.push_back(WordToken{w.word, w.pos, kUnassigned});
    grid_.get_or_create(cell_of(w.pos)).tokens.push_back(id);
    at_t.push_back(id);
    ids.push_back(id);
  }
  return ids;
}

void Model::reassign(TokenId id, TopicId new_topic) {
  check_topic(new_topic);
  WordToken& tok = tokens_.at(id);
  if (tok.topic == new_topic) return;

  Cell* cell = grid_.find_mutable(cell_of(tok.pos));
  if (cell == nullptr) throw CountCorruption("token " + std::to_string(id) + " has no cell");

  if (tok.assigned()) {
    if (cell->topic_hist[tok.topic] == 0) {
      throw CountCorruption("cell histogram underflow in cell " + key_string(cell->key));
    }
    counts_.decrement(tok.topic, tok.word);
    --cell->topic_hist[tok.topic];
  }
  counts_.increment(new_topic, tok.word);
  ++cell->topic_hist[new_topic];
  tok.topic = new_topic;
}

std::vector<std::uint32_t> Model::neighborhood_hist(const CellKey& key,
                                                    std::optional<TokenId> exclude) const {
  auto hist = grid_.neighborhood_hist(key);
  if (!exclude) return hist;

  const WordToken& tok = tokens_.at(*exclude);
  if (!tok.assigned()) throw std::invalid_argument("excluded token is unassigned");
  const auto nb = neighborhood(key, config_.connectivity);
  if (std::find(nb.begin(), nb.end(), cell_of(tok.pos)) == nb.end()) {
    throw std::invalid_argument("excluded token lies outside the neighborhood of " +
                                key_string(key));
  }
  if (hist[tok.topic] == 0) {
    throw CountCorruption("neighborhood histogram underflow around " + key_string(key));
  }
  --hist[tok.topic];
  return hist;
}

std::vector<double> Model::theta(const CellKey& key) const {
  const auto hist = neighborhood_hist(key);
  const double total = std::accumulate(hist.begin(), hist.end(), 0.0) +
                       static_cast<double>(config_.topics) * config_.alpha;
  std::vector<double> out(hist.size());
  for (std::size_t k = 0; k < hist.size(); ++k) {
    out[k] = (static_cast<double>(hist[k]) + config_.alpha) / total;
  }
  return out;
}

void Model::check_consistency() const {
  const std::size_t K = config_.topics;
  const std::size_t V = config_.vocab_size;
  std::vector<std::uint32_t> counts(K * V, 0);
  std::vector<std::uint32_t> totals(K, 0);
  std::map<CellKey, std::vector<std::uint32_t>> cell_hist;

  for (TokenId id = 0; id < tokens_.size(); ++id) {
    const auto& tok = tokens_[id];
    const CellKey key = cell_of(tok.pos);
    const Cell* cell = grid_.find(key);
    if (cell == nullptr || std::find(cell->tokens.begin(), cell->tokens.end(), id) == cell->tokens.end()) {
      throw CountCorruption("token " + std::to_string(id) + " missing from cell " + key_string(key));
    }
    auto& h = cell_hist.try_emplace(key, K, 0).first->second;
    if (!tok.assigned()) continue;
    ++counts[tok.topic * V + tok.word];
    ++totals[tok.topic];
    ++h[tok.topic];
  }

  for (std::size_t k = 0; k < K; ++k) {
    if (totals[k] != counts_.total(static_cast<TopicId>(k))) {
      throw CountCorruption("topic total mismatch at topic " + std::to_string(k));
    }
    for (std::size_t v = 0; v < V; ++v) {
      if (counts[k * V + v] != counts_.count(static_cast<TopicId>(k), static_cast<WordId>(v))) {
        throw CountCorruption("topic-word count mismatch at topic " + std::to_string(k));
      }
    }
  }

  std::size_t token_sum = 0;
  for (const auto& [key, cell] : grid_.cells()) {
    token_sum += cell.tokens.size();
    auto it = cell_hist.find(key);
    const std::vector<std::uint32_t> zero(K, 0);
    const auto& expect = it == cell_hist.end() ? zero : it->second;
    if (expect != cell.topic_hist) {
      throw CountCorruption("cell histogram mismatch in cell " + key_string(key));
    }
    const auto members = grid_.cells_at(key.ct);
    if (!std::binary_search(members.begin(), members.end(), key)) {
      throw CountCorruption("cell " + key_string(key) + " missing from time index");
    }
  }
  if (token_sum != tokens_.size()) throw CountCorruption("cells hold a different token count");

  for (Timestep t = 0; t < num_timesteps(); ++t) {
    for (const auto& key : grid_.cells_at(t)) {
      const Cell* cell = grid_.find(key);
      if (cell == nullptr || cell->tokens.empty() || key.ct != t) {
        throw CountCorruption("time index lists an empty or foreign cell " + key_string(key));
      }
    }
  }
}

}  // namespace rost
