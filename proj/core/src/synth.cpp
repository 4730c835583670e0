#include "rost/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rost/model.hpp"
#include "rost/random.hpp"

namespace rost {
namespace {

constexpr double kAmplitude = 4.0;

std::size_t draw(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return 0;
}

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

}  // namespace

PlantedModel make_separable(const SeparableOptions& options) {
  const std::size_t K = options.topics;
  const std::size_t V = options.vocab_size;
  if (K == 0) throw std::invalid_argument("synthetic model needs at least one topic");
  if (V < K) throw std::invalid_argument("vocabulary size must be at least the topic count");
  if (options.extent <= 0 || options.steps < 0 || options.cell_size <= 0) {
    throw std::invalid_argument("extent and cell size must be positive, steps non-negative");
  }
  if (options.smoothness < 0.0 || options.smoothness > 1.0) {
    throw std::invalid_argument("smoothness must lie in [0, 1]");
  }

  PlantedModel m;
  m.topics = K;
  m.vocab_size = V;
  m.words_per_step = options.words_per_step;
  m.extent = options.extent;
  m.steps = options.steps;
  m.cell_size = options.cell_size;
  m.seed = options.seed;

  const std::size_t slice = V / K;
  m.phi_true.assign(K, std::vector<double>(V, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t v = k * slice; v < (k + 1) * slice; ++v) {
      m.phi_true[k][v] = 1.0 / static_cast<double>(slice);
    }
  }

  Rng rng(options.seed, 0);
  struct Wave {
    double wx, wy, wt, phase;
  };
  std::vector<Wave> waves(K);
  for (auto& w : waves) {
    w.wx = uniform_in(rng, 0.2, 1.0);
    w.wy = uniform_in(rng, 0.2, 1.0);
    w.wt = uniform_in(rng, 0.02, 0.2);
    w.phase = uniform_in(rng, 0.0, 2.0 * std::numbers::pi);
  }

  const double scale = kAmplitude * options.smoothness;
  for (std::int64_t t = 0; t < options.steps; ++t) {
    for (std::int64_t cy = 0; cy < options.extent; ++cy) {
      for (std::int64_t cx = 0; cx < options.extent; ++cx) {
        std::vector<double> theta(K);
        double norm = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          const auto& w = waves[k];
          const double arg = w.wx * static_cast<double>(cx) + w.wy * static_cast<double>(cy) +
                             w.wt * static_cast<double>(t) + w.phase;
          theta[k] = std::exp(scale * std::sin(arg));
          norm += theta[k];
        }
        for (auto& p : theta) p /= norm;
        m.theta_field.emplace(CellKey{cx, cy, t}, std::move(theta));
      }
    }
  }
  return m;
}

SyntheticStream generate(const PlantedModel& model) {
  SyntheticStream out;
  Rng rng(model.seed, 1);
  const auto span = static_cast<std::uint64_t>(model.extent * model.cell_size);

  for (std::int64_t t = 0; t < model.steps; ++t) {
    Observation obs;
    obs.t = t;
    std::vector<TopicId> labels;
    obs.words.reserve(model.words_per_step);
    labels.reserve(model.words_per_step);
    for (std::size_t i = 0; i < model.words_per_step; ++i) {
      Position pos{static_cast<std::int64_t>(rng.below(span)),
                   static_cast<std::int64_t>(rng.below(span)), t};
      const auto& theta = model.theta_field.at(cell_of(pos, model.cell_size));
      const auto z = static_cast<TopicId>(draw(theta, rng));
      const auto w = static_cast<WordId>(draw(model.phi_true[z], rng));
      obs.words.push_back(ObservedWord{w, pos});
      labels.push_back(z);
    }
    out.stream.push_back(std::move(obs));
    out.labels.push_back(std::move(labels));
  }
  return out;
}

TopicId owning_topic(const PlantedModel& model, WordId v) {
  const std::size_t slice = model.vocab_size / model.topics;
  return static_cast<TopicId>(v / slice);
}

}  // namespace rost
