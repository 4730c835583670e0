#include "rost/pipeline.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rost {
namespace {

using Clock = std::chrono::steady_clock;

void check_consecutive(const Stream& stream) {
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (stream[i].t != static_cast<Timestep>(i)) {
      throw std::invalid_argument("stream timesteps must be consecutive from 0; observation " +
                                  std::to_string(i) + " has t=" + std::to_string(stream[i].t));
    }
  }
}

void fill_final_scores(const Model& model, RunReport& report) {
  for (auto& rec : report.timesteps) {
    if (rec.n_words > 0) rec.final_ppx = instantaneous_ppx(model, rec.t);
  }
  std::vector<TokenId> all(model.tokens().size());
  std::iota(all.begin(), all.end(), TokenId{0});
  if (!all.empty()) report.final_ppx = perplexity(model, all);
}

}  // namespace

std::uint64_t RefinementLedger::total_rounds() const {
  return std::accumulate(r.begin(), r.end(), std::uint64_t{0});
}

void RefinementLedger::record(Timestep t, std::uint64_t words) {
  const auto idx = static_cast<std::size_t>(t);
  if (idx >= r.size()) {
    r.resize(idx + 1, 0);
    words_refined.resize(idx + 1, 0);
  }
  ++r[idx];
  words_refined[idx] += words;
}

// ---------------------------------------------------------------------------

RealtimeSampler::RealtimeSampler(std::size_t vocab_size, const RunConfig& config)
    : config_(config),
      model_(config.params.model_config(vocab_size, config.cell_size)),
      rng_(config.params.seed) {
  config_.scheduler.validate();
}

std::uint64_t RealtimeSampler::run_round() {
  const Timestep T = model_.num_timesteps();
  const Timestep t = sample(config_.scheduler, T, rng_) - 1;
  if (observer_) observer_(t);

  std::uint64_t words = 0;
  for (const CellKey& key : model_.grid().cells_at(t)) words += refine_cell(model_, key, rng_);
  ledger_.record(t, words);
  words_refined_ += words;
  return words;
}

std::uint64_t RealtimeSampler::refine_window() {
  if (model_.num_timesteps() == 0) return 0;
  const Budget& budget = config_.budget;
  std::uint64_t rounds = 0;
  if (budget.mode == Budget::Mode::Rounds) {
    for (; rounds < budget.rounds_per_interval; ++rounds) run_round();
    return rounds;
  }
  const auto deadline = Clock::now() + std::chrono::milliseconds(budget.millis_per_interval);
  do {
    run_round();
    ++rounds;
  } while (Clock::now() < deadline);
  return rounds;
}

StepReport RealtimeSampler::step(const Observation& observation) {
  StepReport report;
  report.t = observation.t;

  const Timestep prev = model_.num_timesteps() - 1;
  if (prev >= 0 && !model_.tokens_at(prev).empty()) {
    report.previous_instant_ppx = instantaneous_ppx(model_, prev);
  }

  const auto ids = model_.add_observation(observation.t, observation.words);
  ledger_.r.resize(static_cast<std::size_t>(model_.num_timesteps()), 0);
  ledger_.words_refined.resize(ledger_.r.size(), 0);
  init_labels(model_, ids, rng_);

  const std::uint64_t before = words_refined_;
  report.rounds = refine_window();
  report.words_refined = words_refined_ - before;
  return report;
}

// ---------------------------------------------------------------------------

RunReport run_stream(const Stream& stream, std::size_t vocab_size, const RunConfig& config,
                     RealtimeSampler::RoundObserver observer) {
  RunReport report;
  if (stream.empty()) return report;
  check_consecutive(stream);

  RealtimeSampler sampler(vocab_size, config);
  if (observer) sampler.set_round_observer(std::move(observer));

  for (const auto& obs : stream) {
    const StepReport step = sampler.step(obs);
    if (obs.t > 0) report.timesteps.back().instant_ppx = step.previous_instant_ppx;
    TimestepRecord rec;
    rec.t = obs.t;
    rec.n_words = obs.words.size();
    report.timesteps.push_back(rec);
  }
  sampler.refine_window();

  const Model& model = sampler.model();
  auto& last = report.timesteps.back();
  if (last.n_words > 0) last.instant_ppx = instantaneous_ppx(model, last.t);

  fill_final_scores(model, report);
  report.ledger = sampler.ledger();
  for (auto& rec : report.timesteps) {
    rec.r_t = report.ledger.r[static_cast<std::size_t>(rec.t)];
    rec.words_refined = report.ledger.words_refined[static_cast<std::size_t>(rec.t)];
  }
  report.rounds_executed = report.ledger.total_rounds();
  report.words_refined = sampler.words_refined();
  return report;
}

BatchBudget equivalent_batch_budget(const Stream& stream, const Budget& budget) {
  BatchBudget out;
  const auto windows = static_cast<std::uint64_t>(stream.size()) + 1;
  if (budget.mode == Budget::Mode::WallClock) {
    out.total_millis = budget.millis_per_interval * windows;
    return out;
  }
  std::uint64_t words = 0;
  for (const auto& obs : stream) words += obs.words.size();
  const double per_round = stream.empty() ? 0.0 : static_cast<double>(words) / static_cast<double>(stream.size());
  out.word_refinements = static_cast<std::uint64_t>(
      std::llround(per_round * static_cast<double>(budget.rounds_per_interval * windows)));
  return out;
}

RunReport run_batch_baseline(const Stream& stream, std::size_t vocab_size,
                             const GibbsParams& params, std::int64_t cell_size,
                             const BatchBudget& budget) {
  RunReport report;
  if (stream.empty()) return report;
  check_consecutive(stream);

  Model model(params.model_config(vocab_size, cell_size));
  Rng rng(params.seed);
  for (const auto& obs : stream) {
    const auto ids = model.add_observation(obs.t, obs.words);
    init_labels(model, ids, rng);
  }

  std::uint64_t sweeps = 0;
  std::uint64_t refined = 0;
  if (budget.total_millis) {
    const auto deadline = Clock::now() + std::chrono::milliseconds(*budget.total_millis);
    do {
      refined += batch_gibbs(model, 1, rng);
      ++sweeps;
    } while (Clock::now() < deadline);
  } else {
    const std::uint64_t target = budget.word_refinements.value_or(0);
    while (refined < target) {
      const std::uint64_t words = batch_gibbs(model, 1, rng);
      if (words == 0) break;
      refined += words;
      ++sweeps;
    }
  }

  report.ledger.r.assign(stream.size(), sweeps);
  report.ledger.words_refined.resize(stream.size());
  for (const auto& obs : stream) {
    TimestepRecord rec;
    rec.t = obs.t;
    rec.n_words = obs.words.size();
    rec.r_t = sweeps;
    rec.words_refined = sweeps * rec.n_words;
    report.ledger.words_refined[static_cast<std::size_t>(obs.t)] = rec.words_refined;
    report.timesteps.push_back(rec);
  }
  fill_final_scores(model, report);
  for (auto& rec : report.timesteps) rec.instant_ppx = rec.final_ppx;
  report.rounds_executed = sweeps;
  report.words_refined = refined;
  return report;
}

PerplexityTrace to_trace(const RunReport& report) {
  PerplexityTrace trace;
  for (const auto& rec : report.timesteps) {
    if (rec.instant_ppx) trace.instant.emplace_back(rec.t, *rec.instant_ppx);
    if (rec.final_ppx) trace.final_by_t.emplace_back(rec.t, *rec.final_ppx);
  }
  trace.final_ppx = report.final_ppx.value_or(0.0);
  return trace;
}

}  // namespace rost
