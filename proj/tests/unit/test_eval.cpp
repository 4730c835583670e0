#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rost/eval.hpp"
#include "rost/sampler.hpp"
#include "rost/scheduler.hpp"
#include "rost/synth.hpp"

using namespace rost;

namespace {

ModelConfig config(std::size_t K, std::size_t V, double alpha, double beta) {
  ModelConfig cfg;
  cfg.vocab_size = V;
  cfg.topics = K;
  cfg.alpha = alpha;
  cfg.beta = beta;
  return cfg;
}

std::vector<TokenId> all_tokens(const Model& model) {
  std::vector<TokenId> ids(model.tokens().size());
  std::iota(ids.begin(), ids.end(), TokenId{0});
  return ids;
}

PerplexityTrace trace(std::vector<double> instant, std::vector<double> final_by_t) {
  PerplexityTrace tr;
  for (std::size_t i = 0; i < instant.size(); ++i) tr.instant.emplace_back(static_cast<Timestep>(i), instant[i]);
  for (std::size_t i = 0; i < final_by_t.size(); ++i) {
    tr.final_by_t.emplace_back(static_cast<Timestep>(i), final_by_t[i]);
  }
  return tr;
}

}  // namespace

TEST_CASE("perplexity of an untrained model is V") {
  for (std::size_t V : {1u, 8u, 37u, 1000u}) {
    Model model(config(5, V, 0.3, 0.7));
    std::vector<ObservedWord> words;
    for (std::size_t i = 0; i < 50; ++i) words.push_back({static_cast<WordId>(i % V), {static_cast<std::int64_t>(i * 13), 0, 0}});
    model.add_observation(0, words);
    CHECK(std::abs(perplexity(model, all_tokens(model)) - static_cast<double>(V)) < 1e-9);
  }
}

TEST_CASE("perplexity: two tokens at p = 1/2 and 1/4") {
  // One topic, V=4, beta=1: phi = (3+1, 1+1, 1, 1) / 8 after labelling w0 x3 and w1 x1.
  Model model(config(1, 4, 0.1, 1.0));
  std::vector<ObservedWord> words{{0, {0, 0, 0}}, {0, {0, 0, 0}}, {0, {0, 0, 0}}, {1, {0, 0, 0}}};
  const auto ids = model.add_observation(0, words);
  for (auto id : ids) model.reassign(id, 0);
  const std::vector<TokenId> probe{ids[0], ids[3]};
  CHECK(perplexity(model, probe) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
  CHECK(perplexity(model, probe) == doctest::Approx(2.8284271247461903).epsilon(1e-14));
}

TEST_CASE("perplexity: errors") {
  Model model(config(2, 4, 0.1, 0.5));
  CHECK_THROWS_AS(perplexity(model, std::vector<TokenId>{}), std::invalid_argument);
  CHECK_THROWS_AS(instantaneous_ppx(model, 0), std::out_of_range);
  model.add_observation(0, {});
  CHECK_THROWS_AS(instantaneous_ppx(model, 0), std::invalid_argument);
  CHECK_THROWS_AS(instantaneous_ppx(model, 1), std::out_of_range);
}

TEST_CASE("instantaneous_ppx on a single timestep equals perplexity over everything") {
  SeparableOptions opts;
  opts.topics = 3;
  opts.vocab_size = 12;
  opts.steps = 1;
  opts.words_per_step = 80;
  const auto synth = generate(make_separable(opts));
  Model model(config(3, 12, 0.1, 0.5));
  Rng rng(4);
  init_labels(model, model.add_observation(0, synth.stream[0].words), rng);
  batch_gibbs(model, 5, rng);
  CHECK(instantaneous_ppx(model, 0) == perplexity(model, all_tokens(model)));
}

TEST_CASE("unseen vocabulary is less predictable") {
  Model model(config(2, 8, 0.1, 0.5));
  std::vector<ObservedWord> seen;
  for (int i = 0; i < 200; ++i) seen.push_back({static_cast<WordId>(i % 4), {0, 0, 0}});
  Rng rng(5);
  init_labels(model, model.add_observation(0, seen), rng);
  batch_gibbs(model, 20, rng);
  std::vector<ObservedWord> fresh;
  for (int i = 0; i < 4; ++i) fresh.push_back({static_cast<WordId>(4 + i), {0, 0, 1}});
  init_labels(model, model.add_observation(1, fresh), rng);
  CHECK(instantaneous_ppx(model, 1) > instantaneous_ppx(model, 0));
}

TEST_CASE("property: perplexity is order invariant and at least 1") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeparableOptions opts;
    opts.topics = 4;
    opts.vocab_size = 24;
    opts.steps = 4;
    opts.words_per_step = 40;
    opts.seed = seed;
    const auto synth = generate(make_separable(opts));
    Model model(config(4, 24, 0.1, 0.5));
    Rng rng(seed);
    for (const auto& obs : synth.stream) init_labels(model, model.add_observation(obs.t, obs.words), rng);
    batch_gibbs(model, 3, rng);

    auto ids = all_tokens(model);
    const double base = perplexity(model, ids);
    CHECK(base >= 1.0);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
      for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
      CHECK(perplexity(model, ids) == doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: per-timestep perplexities combine into the overall perplexity") {
  SeparableOptions opts;
  opts.topics = 4;
  opts.vocab_size = 24;
  opts.steps = 7;
  opts.words_per_step = 25;
  const auto synth = generate(make_separable(opts));
  Model model(config(4, 24, 0.1, 0.5));
  Rng rng(6);
  for (const auto& obs : synth.stream) init_labels(model, model.add_observation(obs.t, obs.words), rng);
  batch_gibbs(model, 4, rng);

  double weighted = 0.0;
  double n = 0.0;
  for (Timestep t = 0; t < model.num_timesteps(); ++t) {
    const double w = static_cast<double>(model.tokens_at(t).size());
    weighted += w * std::log(instantaneous_ppx(model, t));
    n += w;
  }
  CHECK(std::exp(weighted / n) == doctest::Approx(perplexity(model, all_tokens(model))).epsilon(1e-12));
}

TEST_CASE("training drives the perplexity of a repeated word down") {
  const std::vector<std::size_t> checkpoints{0, 1, 2, 5, 10, 20};
  std::vector<std::vector<double>> runs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Model model(config(4, 10, 0.1, 0.5));
    std::vector<ObservedWord> words;
    for (int i = 0; i < 120; ++i) words.push_back({0, {(i % 6) * 64, 0, 0}});
    Rng rng(seed);
    init_labels(model, model.add_observation(0, words), rng);
    std::vector<double> trace;
    std::size_t done = 0;
    for (std::size_t c : checkpoints) {
      batch_gibbs(model, c - done, rng);
      done = c;
      trace.push_back(perplexity(model, all_tokens(model)));
    }
    runs.push_back(trace);
  }
  double previous = 1e300;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    std::vector<double> column;
    for (const auto& r : runs) column.push_back(r[i]);
    std::nth_element(column.begin(), column.begin() + 2, column.end());
    CHECK(column[2] <= previous);
    previous = column[2];
  }
  // Best case is one topic holding every token: (n + beta) / (n + V beta).
  CHECK(previous >= (120.0 + 5.0) / (120.0 + 0.5));
}

TEST_CASE("long refinement approaches the planted model's perplexity") {
  SeparableOptions opts;
  opts.topics = 4;
  opts.vocab_size = 40;
  opts.extent = 3;
  opts.steps = 30;
  opts.words_per_step = 60;
  opts.smoothness = 1.0;
  opts.seed = 2;
  const PlantedModel planted = make_separable(opts);
  const auto synth = generate(planted);

  double log_sum = 0.0;
  double n = 0.0;
  for (const auto& obs : synth.stream) {
    for (const auto& w : obs.words) {
      const auto& theta = planted.theta_field.at(cell_of(w.pos, planted.cell_size));
      double p = 0.0;
      for (std::size_t k = 0; k < planted.topics; ++k) p += planted.phi_true[k][w.word] * theta[k];
      log_sum += std::log(p);
      n += 1.0;
    }
  }
  const double planted_ppx = std::exp(-log_sum / n);

  Model model(config(4, 40, 0.1, 0.5));
  Rng rng(8);
  for (const auto& obs : synth.stream) init_labels(model, model.add_observation(obs.t, obs.words), rng);
  batch_gibbs(model, 300, rng);
  const double learned = perplexity(model, all_tokens(model));
  CAPTURE(planted_ppx);
  CAPTURE(learned);
  CHECK(std::abs(learned / planted_ppx - 1.0) < 0.15);
}

TEST_CASE("nmi: worked values") {
  const std::vector<TopicId> a{0, 0, 1, 1, 2, 2};
  const std::vector<TopicId> renamed{5, 5, 3, 3, 9, 9};
  CHECK(nmi(a, a) == doctest::Approx(1.0));
  CHECK(nmi(a, renamed) == doctest::Approx(1.0));

  const std::vector<TopicId> x{0, 0, 1, 1};
  const std::vector<TopicId> y{0, 1, 0, 1};
  CHECK(nmi(x, y) == doctest::Approx(0.0));

  const std::vector<TopicId> constant{4, 4, 4, 4};
  CHECK(nmi(constant, constant) == 1.0);
  CHECK(nmi(constant, x) == 0.0);

  CHECK_THROWS_AS(nmi(x, a), std::invalid_argument);
  CHECK_THROWS_AS(nmi(std::vector<TopicId>{}, std::vector<TopicId>{}), std::invalid_argument);
}

TEST_CASE("property: nmi is symmetric, rename invariant and bounded") {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    const std::size_t ka = 1 + rng.below(5);
    const std::size_t kb = 1 + rng.below(5);
    std::vector<TopicId> a(n), b(n);
    for (auto& v : a) v = static_cast<TopicId>(rng.below(ka));
    for (auto& v : b) v = static_cast<TopicId>(rng.below(kb));
    const double s = nmi(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(nmi(b, a) == doctest::Approx(s).epsilon(1e-12));
    std::vector<TopicId> renamed(a);
    for (auto& v : renamed) v = static_cast<TopicId>(ka - 1 - v + 100);
    CHECK(nmi(renamed, b) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("mean_trace averages pointwise") {
  const std::vector<PerplexityTrace> runs{trace({2, 4}, {1, 3}), trace({4, 8}, {3, 5})};
  auto m = mean_trace(runs);
  CHECK(m.instant == TimeSeries{{0, 3.0}, {1, 6.0}});
  CHECK(m.final_by_t == TimeSeries{{0, 2.0}, {1, 4.0}});
  const std::vector<PerplexityTrace> mismatched{trace({2, 4}, {1, 3}), trace({4}, {3})};
  CHECK_THROWS_AS(mean_trace(mismatched), std::invalid_argument);
  CHECK_THROWS_AS(mean_trace(std::vector<PerplexityTrace>{}), std::invalid_argument);
}

TEST_CASE("compare_report") {
  const PerplexityTrace batch = trace({10, 20}, {5, 5});

  SUBCASE("a trace identical to batch has unit ratios") {
    const auto table = compare_report({{"now", batch}}, batch, 10.0);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].instant_ratio == 1.0);
    CHECK(table.rows[0].final_ratio == 1.0);
    CHECK(table.rows.back().scheduler == "batch");
    for (const auto& pt : table.per_timestep[0].points) {
      CHECK(pt.instant_ratio == 1.0);
      CHECK(pt.final_ratio == 1.0);
    }
  }
  SUBCASE("means are over timesteps and ratios over batch means") {
    const auto table = compare_report({{"uniform", trace({20, 40}, {10, 5})}}, batch, 40.0);
    const auto* row = table.find("uniform");
    REQUIRE(row != nullptr);
    CHECK(row->budget == 40.0);
    CHECK(row->mean_instant_ppx == doctest::Approx(30.0));
    CHECK(row->mean_final_ppx == doctest::Approx(7.5));
    CHECK(row->instant_ratio == doctest::Approx(2.0));
    CHECK(row->final_ratio == doctest::Approx(1.5));
    CHECK(table.per_timestep[0].points[0].final_ratio == doctest::Approx(2.0));
    CHECK(table.per_timestep[0].points[1].final_ratio == doctest::Approx(1.0));
    CHECK(table.find("missing") == nullptr);
  }
  SUBCASE("eight schedulers give nine rows") {
    std::vector<std::pair<std::string, PerplexityTrace>> traces;
    for (auto v : kAllSchedulerVariants) traces.emplace_back(std::string(scheduler_name(v)), batch);
    CHECK(compare_report(traces, batch, 10.0).rows.size() == 9);
  }
  SUBCASE("a trace over a different stream is rejected") {
    CHECK_THROWS_AS(compare_report({{"now", trace({1, 2, 3}, {1, 2, 3})}}, batch, 10.0), std::invalid_argument);
  }
}
