#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "rost/model.hpp"
#include "rost/random.hpp"
#include "support/oracles.hpp"

using namespace rost;

namespace {

ModelConfig small_config(std::size_t K, std::size_t V, double alpha = 0.1, double beta = 0.5) {
  ModelConfig cfg;
  cfg.vocab_size = V;
  cfg.topics = K;
  cfg.alpha = alpha;
  cfg.beta = beta;
  return cfg;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("cell_of floors spatial coordinates and keeps t") {
  CHECK(cell_of({130, 70, 5}, 64) == CellKey{2, 1, 5});
  CHECK(cell_of({0, 0, 0}, 64) == CellKey{0, 0, 0});
  CHECK(cell_of({-1, 10, 3}, 64) == CellKey{-1, 0, 3});
  CHECK(cell_of({-64, -65, 1}, 64) == CellKey{-1, -2, 1});
  CHECK_THROWS_AS(cell_of({0, 0, 0}, 0), std::invalid_argument);
}

TEST_CASE("cell_of partitions space: every point lies inside its cell") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto size = static_cast<std::int64_t>(1 + rng.below(100));
    const Position p{static_cast<std::int64_t>(rng.below(2000)) - 1000,
                     static_cast<std::int64_t>(rng.below(2000)) - 1000, 0};
    const CellKey c = cell_of(p, size);
    CHECK(c.cx * size <= p.x);
    CHECK(p.x < (c.cx + 1) * size);
    CHECK(c.cy * size <= p.y);
    CHECK(p.y < (c.cy + 1) * size);
  }
}

TEST_CASE("neighborhood is self plus six axis neighbors") {
  auto sorted = [](std::vector<CellKey> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto nb = neighborhood({2, 1, 5});
  CHECK(nb.front() == CellKey{2, 1, 5});
  CHECK(sorted(nb) == sorted({{2, 1, 5}, {1, 1, 5}, {3, 1, 5}, {2, 0, 5}, {2, 2, 5}, {2, 1, 4}, {2, 1, 6}}));

  const auto origin = neighborhood({0, 0, 0});
  CHECK(origin.size() == 6);
  CHECK(std::find(origin.begin(), origin.end(), CellKey{0, 0, 1}) != origin.end());
  CHECK(std::find(origin.begin(), origin.end(), CellKey{0, 0, -1}) == origin.end());

  CHECK(neighborhood({5, 5, 9}).size() == 7);
  CHECK(neighborhood({5, 5, 9}, Connectivity::SelfOnly) == std::vector<CellKey>{{5, 5, 9}});

  for (std::int64_t t = 0; t < 20; ++t) CHECK(neighborhood({t, -t, t}).size() == (t == 0 ? 6u : 7u));
}

TEST_CASE("neighborhood_hist") {
  Model model(small_config(4, 8));

  SUBCASE("empty world gives zeros everywhere") {
    CHECK(model.neighborhood_hist({5, 5, 9}) == std::vector<std::uint32_t>(4, 0));
  }

  SUBCASE("a labelled token is visible from neighboring cells and excludable from its own") {
    const auto ids = model.add_observation(0, std::vector<ObservedWord>{{3, {1, 1, 0}}});
    model.reassign(ids[0], 2);
    CHECK(model.neighborhood_hist({1, 0, 0}) == std::vector<std::uint32_t>{0, 0, 1, 0});
    CHECK(model.neighborhood_hist({0, 0, 0}, ids[0]) == std::vector<std::uint32_t>(4, 0));
    CHECK(model.neighborhood_hist({3, 3, 0}) == std::vector<std::uint32_t>(4, 0));
    CHECK_THROWS_AS(model.neighborhood_hist({3, 3, 0}, ids[0]), std::invalid_argument);
  }

  SUBCASE("excluding an unassigned token is rejected") {
    const auto ids = model.add_observation(0, std::vector<ObservedWord>{{3, {1, 1, 0}}});
    CHECK_THROWS_AS(model.neighborhood_hist({0, 0, 0}, ids[0]), std::invalid_argument);
  }
}

TEST_CASE("phi is the beta-smoothed row of the topic-word table") {
  SUBCASE("empty model is uniform") {
    Model model(small_config(2, 4, 0.1, 0.5));
    for (double p : model.phi(0)) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("populated topic") {
    Model model(small_config(2, 4, 0.1, 0.5));
    std::vector<ObservedWord> words{{0, {0, 0, 0}}, {0, {0, 0, 0}}, {0, {0, 0, 0}}, {1, {0, 0, 0}}};
    const auto ids = model.add_observation(0, words);
    for (auto id : ids) model.reassign(id, 0);
    const auto phi = model.phi(0);
    CHECK(phi[0] == doctest::Approx(3.5 / 6.0).epsilon(1e-14));
    CHECK(phi[1] == doctest::Approx(1.5 / 6.0).epsilon(1e-14));
    CHECK(phi[2] == doctest::Approx(0.5 / 6.0).epsilon(1e-14));
    CHECK(phi[3] == doctest::Approx(0.5 / 6.0).epsilon(1e-14));
    // Topic 1 is untouched by topic 0's counts.
    for (double p : model.phi(1)) CHECK(p == doctest::Approx(0.25));
    CHECK(std::abs(sum(phi) - 1.0) < 1e-9);
  }
  SUBCASE("out of range topic") {
    Model model(small_config(2, 4));
    CHECK_THROWS_AS(model.phi(2), std::out_of_range);
  }
}

TEST_CASE("theta normalizes the neighborhood histogram with alpha") {
  SUBCASE("empty world is uniform") {
    Model model(small_config(16, 4, 0.1, 0.5));
    for (double p : model.theta({0, 0, 0})) CHECK(p == doctest::Approx(1.0 / 16.0));
  }
  SUBCASE("histogram [1, 2]") {
    Model model(small_config(2, 4, 0.1, 0.5));
    std::vector<ObservedWord> words{{0, {0, 0, 0}}, {1, {0, 0, 0}}, {2, {0, 0, 0}}};
    const auto ids = model.add_observation(0, words);
    model.reassign(ids[0], 0);
    model.reassign(ids[1], 1);
    model.reassign(ids[2], 1);
    const auto theta = model.theta({0, 0, 0});
    CHECK(theta[0] == doctest::Approx(1.1 / 3.2).epsilon(1e-14));
    CHECK(theta[1] == doctest::Approx(2.1 / 3.2).epsilon(1e-14));
  }
  SUBCASE("mass on one topic drives theta to 1") {
    Model model(small_config(2, 4, 0.1, 0.5));
    double previous = 0.0;
    Timestep t = 0;
    for (std::size_t n : {1u, 10u, 100u, 1000u, 10000u}) {
      std::vector<ObservedWord> words(n, ObservedWord{0, {0, 0, t}});
      for (auto id : model.add_observation(t, words)) model.reassign(id, 0);
      const double now = model.theta({0, 0, t})[0];
      CHECK(now > previous);
      previous = now;
      ++t;
    }
    CHECK(previous > 0.9999);
  }
}

TEST_CASE("add_observation") {
  Model model(small_config(4, 8));

  SUBCASE("tokens arrive unassigned and populate the time index") {
    std::vector<ObservedWord> words{{1, {0, 0, 0}}, {2, {10, 0, 0}}, {3, {100, 0, 0}}};
    const auto ids = model.add_observation(0, words);
    CHECK(ids.size() == 3);
    for (auto id : ids) CHECK_FALSE(model.token(id).assigned());
    CHECK(model.grid().cells_at(0).size() == 2);
    CHECK(model.counts().total(0) == 0);
    model.check_consistency();
  }
  SUBCASE("out of order timesteps are rejected") {
    CHECK_THROWS_AS(model.add_observation(1, {}), std::invalid_argument);
    model.add_observation(0, {});
    CHECK_THROWS_AS(model.add_observation(0, {}), std::invalid_argument);
    CHECK_NOTHROW(model.add_observation(1, {}));
  }
  SUBCASE("word index V is rejected") {
    std::vector<ObservedWord> words{{8, {0, 0, 0}}};
    CHECK_THROWS_AS(model.add_observation(0, words), std::invalid_argument);
    CHECK(model.num_timesteps() == 0);
  }
  SUBCASE("position timestep must match") {
    std::vector<ObservedWord> words{{1, {0, 0, 1}}};
    CHECK_THROWS_AS(model.add_observation(0, words), std::invalid_argument);
  }
}

TEST_CASE("reassign keeps both tables in step") {
  Model model(small_config(4, 8));
  std::vector<ObservedWord> words{{5, {0, 0, 0}}};
  const auto id = model.add_observation(0, words)[0];

  model.reassign(id, 3);
  CHECK(model.counts().count(3, 5) == 1);
  CHECK(model.grid().find({0, 0, 0})->topic_hist[3] == 1);

  model.reassign(id, 3);
  CHECK(model.counts().count(3, 5) == 1);
  CHECK(model.counts().total(3) == 1);

  model.reassign(id, 1);
  CHECK(model.counts().count(3, 5) == 0);
  CHECK(model.counts().count(1, 5) == 1);
  std::uint64_t total = 0;
  for (TopicId k = 0; k < 4; ++k) total += model.counts().total(k);
  CHECK(total == 1);

  CHECK_THROWS_AS(model.reassign(id, 4), std::out_of_range);
  model.check_consistency();
}

TEST_CASE("decrementing an empty count is reported as corruption") {
  TopicCounts counts(2, 3, 0.5);
  CHECK_THROWS_AS(counts.decrement(0, 1), CountCorruption);
}

TEST_CASE("property: random reassignments conserve counts across all tables") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Model model = testing::random_world(seed, 100, 5, 7);
    Rng rng(seed, 9);
    for (int step = 0; step < 300; ++step) {
      const TokenId id = rng.below(model.tokens().size());
      model.reassign(id, static_cast<TopicId>(rng.below(5)));
    }
    model.check_consistency();

    std::vector<std::uint64_t> by_cells(5, 0);
    for (const auto& [key, cell] : model.grid().cells()) {
      for (std::size_t k = 0; k < 5; ++k) by_cells[k] += cell.topic_hist[k];
    }
    std::uint64_t assigned = 0;
    for (TopicId k = 0; k < 5; ++k) {
      CHECK(by_cells[k] == model.counts().total(k));
      assigned += model.counts().total(k);
    }
    CHECK(assigned == model.tokens().size());

    for (TopicId k = 0; k < 5; ++k) CHECK(std::abs(sum(model.phi(k)) - 1.0) < 1e-9);
    for (const auto& [key, cell] : model.grid().cells()) {
      CHECK(std::abs(sum(model.theta(key)) - 1.0) < 1e-9);
      for (const auto& nb : neighborhood(key)) CHECK(std::abs(sum(model.theta(nb)) - 1.0) < 1e-9);
    }
  }
}
