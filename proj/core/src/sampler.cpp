#include "rost/sampler.hpp"

#include <numeric>
#include <stdexcept>

namespace rost {
namespace {

// Unnormalized conditional weights. `hist` is n_G with the token already
// removed; `excluded` is the token's current topic (or kUnassigned) and is
// removed from the topic-word tables here.
void conditional_weights(const Model& model, WordId word, TopicId excluded,
                         std::span<const std::uint32_t> hist, std::vector<double>& out) {
  const TopicCounts& counts = model.counts();
  const std::size_t K = model.topics();
  const double alpha = model.config().alpha;
  const double beta = model.config().beta;
  const double v_beta = static_cast<double>(model.vocab_size()) * beta;

  std::uint64_t hist_total = 0;
  for (auto h : hist) hist_total += h;
  const double context_denom = static_cast<double>(hist_total) + static_cast<double>(K) * alpha;

  out.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto topic = static_cast<TopicId>(k);
    double n_kv = counts.count(topic, word);
    double n_k = counts.total(topic);
    if (topic == excluded) {
      n_kv -= 1.0;
      n_k -= 1.0;
    }
    out[k] = (n_kv + beta) / (n_k + v_beta) *
             ((static_cast<double>(hist[k]) + alpha) / context_denom);
  }
}

void require_assigned(const WordToken& tok, TokenId id) {
  if (!tok.assigned()) {
    throw std::logic_error("token " + std::to_string(id) + " must be initialized before refinement");
  }
}

}  // namespace

void GibbsParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (topics == 0) throw std::invalid_argument("topic count must be at least 1");
}

ModelConfig GibbsParams::model_config(std::size_t vocab_size, std::int64_t cell_size) const {
  validate();
  ModelConfig cfg;
  cfg.vocab_size = vocab_size;
  cfg.topics = topics;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.cell_size = cell_size;
  return cfg;
}

std::vector<double> posterior(const Model& model, TokenId token) {
  const WordToken& tok = model.token(token);
  const CellKey key = model.cell_of(tok.pos);
  const auto hist = tok.assigned() ? model.neighborhood_hist(key, token)
                                   : model.neighborhood_hist(key);
  std::vector<double> p;
  conditional_weights(model, tok.word, tok.topic, hist, p);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  return p;
}

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("cannot sample from an empty distribution");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding can leave u == acc at the very end; fall back to the last
  // non-zero weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

void init_labels(Model& model, std::span<const TokenId> tokens, Rng& rng) {
  for (TokenId id : tokens) {
    if (model.token(id).assigned()) {
      throw std::logic_error("token " + std::to_string(id) + " is already initialized");
    }
  }
  for (TokenId id : tokens) {
    model.reassign(id, static_cast<TopicId>(rng.below(model.topics())));
  }
}

TopicId refine_word(Model& model, TokenId token, Rng& rng) {
  const WordToken& tok = model.token(token);
  require_assigned(tok, token);
  const auto hist = model.neighborhood_hist(model.cell_of(tok.pos), token);
  std::vector<double> weights;
  conditional_weights(model, tok.word, tok.topic, hist, weights);
  const auto z = static_cast<TopicId>(sample_categorical(weights, rng));
  model.reassign(token, z);
  return z;
}

std::size_t refine_cell(Model& model, const CellKey& key, Rng& rng) {
  const Cell* cell = model.grid().find(key);
  if (cell == nullptr) return 0;

  // Only this cell's histogram changes while its tokens are refined, so the
  // neighborhood sum is maintained incrementally instead of recomputed per word.
  auto hist = model.neighborhood_hist(key);
  std::vector<double> weights;
  const std::vector<TokenId> members = cell->tokens;
  for (TokenId id : members) {
    const WordToken& tok = model.token(id);
    require_assigned(tok, id);
    if (hist[tok.topic] == 0) throw CountCorruption("neighborhood histogram underflow");
    --hist[tok.topic];
    conditional_weights(model, tok.word, tok.topic, hist, weights);
    const auto z = static_cast<TopicId>(sample_categorical(weights, rng));
    model.reassign(id, z);
    ++hist[z];
  }
  return members.size();
}

std::uint64_t batch_gibbs(Model& model, std::size_t n_sweeps, Rng& rng) {
  std::vector<CellKey> order;
  order.reserve(model.grid().cells().size());
  for (const auto& entry : model.grid().cells()) order.push_back(entry.first);

  std::uint64_t refined = 0;
  for (std::size_t sweep = 0; sweep < n_sweeps; ++sweep) {
    for (const auto& key : order) refined += refine_cell(model, key, rng);
  }
  return refined;
}

}  // namespace rost
