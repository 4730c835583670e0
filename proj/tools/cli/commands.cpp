#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "rost/stream_io.hpp"
#include "rost/synth.hpp"

namespace rost::cli {
namespace {

Budget budget_from(const CliConfig& config) {
  if (config.budget_rounds.has_value() == config.budget_millis.has_value()) {
    throw std::invalid_argument("exactly one of --budget-rounds or --budget-millis is required");
  }
  return config.budget_rounds ? Budget::rounds(*config.budget_rounds)
                              : Budget::millis(*config.budget_millis);
}

GibbsParams params_from(const CliConfig& config) {
  GibbsParams params;
  params.alpha = config.alpha;
  params.beta = config.beta;
  params.topics = config.topics;
  params.seed = config.seed;
  params.validate();
  return params;
}

SchedulerKind scheduler_from(const CliConfig& config) {
  const auto variant = parse_scheduler(config.scheduler);
  if (!variant) {
    throw std::invalid_argument("unknown scheduler '" + config.scheduler +
                                "'; valid names: " + scheduler_names());
  }
  SchedulerKind kind{*variant, config.q, config.eta};
  kind.validate();
  return kind;
}

StreamData load(const CliConfig& config, std::ostream& err) {
  if (config.input.empty()) throw std::invalid_argument("--input is required");
  StreamData data = read_stream(config.input);
  for (const auto& w : data.warnings) err << "warning: " << w << '\n';
  return data;
}

void require_output(const CliConfig& config) {
  if (config.output.empty()) throw std::invalid_argument("--output is required");
}

// Runs jobs [0, n) on up to `threads` workers; each job writes only its own slot.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& job) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

ComparisonTable run_comparison(const Stream& stream, std::size_t vocab_size,
                               const CompareOptions& options) {
  if (options.restarts == 0) throw std::invalid_argument("--restarts must be at least 1");
  const std::size_t n_sched = kAllSchedulerVariants.size();
  const std::size_t restarts = options.restarts;

  // Slots: scheduler-major for online runs, then one batch run per restart.
  std::vector<PerplexityTrace> online(n_sched * restarts);
  std::vector<PerplexityTrace> batch(restarts);
  const BatchBudget batch_budget = equivalent_batch_budget(stream, options.budget);

  parallel_for(online.size() + restarts, options.threads, [&](std::size_t job) {
    if (job < online.size()) {
      const std::size_t s = job / restarts;
      const std::size_t r = job % restarts;
      RunConfig cfg;
      cfg.params = options.params;
      cfg.params.seed = options.params.seed + r;
      cfg.cell_size = options.cell_size;
      cfg.scheduler = SchedulerKind{kAllSchedulerVariants[s], options.q, options.eta};
      cfg.budget = options.budget;
      online[job] = to_trace(run_stream(stream, vocab_size, cfg));
    } else {
      const std::size_t r = job - online.size();
      GibbsParams params = options.params;
      params.seed = options.params.seed + r;
      batch[r] = to_trace(run_batch_baseline(stream, vocab_size, params, options.cell_size, batch_budget));
    }
  });

  std::vector<std::pair<std::string, PerplexityTrace>> traces;
  for (std::size_t s = 0; s < n_sched; ++s) {
    std::span<const PerplexityTrace> runs(online.data() + s * restarts, restarts);
    traces.emplace_back(std::string(scheduler_name(kAllSchedulerVariants[s])), mean_trace(runs));
  }
  return compare_report(traces, mean_trace(batch), static_cast<double>(options.budget.amount()));
}

int cmd_run(const CliConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    require_output(config);
    RunConfig cfg;
    cfg.scheduler = scheduler_from(config);
    cfg.budget = budget_from(config);
    cfg.params = params_from(config);
    cfg.cell_size = config.cell_size;
    const StreamData data = load(config, err);
    const RunReport report = run_stream(data.observations, data.vocab_size, cfg);
    write_report(config.output, report);
    return 0;
  });
}

int cmd_batch(const CliConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    require_output(config);
    const Budget budget = budget_from(config);
    const GibbsParams params = params_from(config);
    const StreamData data = load(config, err);
    const RunReport report =
        run_batch_baseline(data.observations, data.vocab_size, params, config.cell_size,
                           equivalent_batch_budget(data.observations, budget));
    write_report(config.output, report);
    return 0;
  });
}

int cmd_compare(const CliConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    require_output(config);
    CompareOptions options;
    options.params = params_from(config);
    options.cell_size = config.cell_size;
    options.q = config.q;
    options.eta = config.eta;
    options.budget = budget_from(config);
    options.restarts = config.restarts;
    options.threads = config.threads;
    SchedulerKind{SchedulerVariant::UniformExp, config.q, config.eta}.validate();

    const StreamData data = load(config, err);
    const ComparisonTable table = run_comparison(data.observations, data.vocab_size, options);
    write_report(config.output, table);
    auto ratios = config.ratios_output;
    if (ratios.empty()) ratios = std::filesystem::path(config.output).replace_extension("ratios.csv");
    write_ratios(ratios, table);
    return 0;
  });
}

int cmd_synth(const CliConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    require_output(config);
    SeparableOptions opts;
    opts.topics = config.topics;
    opts.vocab_size = config.vocab;
    opts.extent = config.extent;
    opts.steps = config.steps;
    opts.smoothness = config.smoothness;
    opts.seed = config.seed;
    opts.words_per_step = config.words_per_step;
    opts.cell_size = config.cell_size;
    const PlantedModel planted = make_separable(opts);
    const SyntheticStream synth = generate(planted);
    write_stream(config.output, planted.vocab_size, synth.stream);
    auto labels = config.output;
    labels += ".labels";
    write_labels(labels, planted.topics, synth.stream, synth.labels);
    return 0;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming spatiotemporal topic modeling with budgeted Gibbs refinement", "rost"};
  app.require_subcommand(1);
  CliConfig config;

  auto add_model_flags = [&](CLI::App* sub) {
    sub->add_option("--topics", config.topics, "Number of topics K")->capture_default_str();
    sub->add_option("--alpha", config.alpha, "Dirichlet prior on cell topic mixtures")->capture_default_str();
    sub->add_option("--beta", config.beta, "Dirichlet prior on topic word distributions")->capture_default_str();
    sub->add_option("--cell-size", config.cell_size, "Spatial side length of a cell")->capture_default_str();
    sub->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  };
  auto add_io_flags = [&](CLI::App* sub) {
    sub->add_option("--input", config.input, "Input stream file")->required();
    sub->add_option("--output", config.output, "Output CSV path")->required();
  };
  auto add_budget_flags = [&](CLI::App* sub) {
    auto* rounds = sub->add_option("--budget-rounds", config.budget_rounds,
                                   "Refinement rounds R per observation interval");
    auto* millis = sub->add_option("--budget-millis", config.budget_millis,
                                   "Refinement time T_R per observation interval, in ms");
    rounds->excludes(millis);
    millis->excludes(rounds);
  };
  auto add_scheduler_params = [&](CLI::App* sub) {
    sub->add_option("--eta", config.eta, "Mixing weight of the local component")->capture_default_str();
    sub->add_option("--q", config.q, "Geometric parameter of exponential schedulers")->capture_default_str();
  };

  auto* run = app.add_subcommand("run", "Online refinement with one scheduler; writes t,n_words,instant_ppx,r_t");
  add_io_flags(run);
  add_model_flags(run);
  add_budget_flags(run);
  add_scheduler_params(run);
  run->add_option("--scheduler", config.scheduler, "One of: " + scheduler_names())->required();

  auto* batch = app.add_subcommand("batch", "Batch Gibbs baseline with the same total effort as an online run");
  add_io_flags(batch);
  add_model_flags(batch);
  add_budget_flags(batch);

  auto* compare = app.add_subcommand("compare", "All schedulers plus batch, averaged over restarts (seed + i)");
  add_io_flags(compare);
  add_model_flags(compare);
  add_budget_flags(compare);
  add_scheduler_params(compare);
  compare->add_option("--restarts", config.restarts, "Independent restarts per scheduler")->capture_default_str();
  compare->add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  compare->add_option("--ratios-output", config.ratios_output,
                      "Per-timestep ratio CSV (default: <output stem>.ratios.csv)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic stream with planted topics and a .labels sidecar");
  synth->add_option("--output", config.output, "Stream file to write")->required();
  add_model_flags(synth);
  synth->add_option("--vocab", config.vocab, "Vocabulary size V")->capture_default_str();
  synth->add_option("--steps", config.steps, "Number of timesteps")->capture_default_str();
  synth->add_option("--words-per-step", config.words_per_step, "Words per timestep")->capture_default_str();
  synth->add_option("--smoothness", config.smoothness, "Strength of the spatial topic field in [0,1]")->capture_default_str();
  synth->add_option("--extent", config.extent, "Spatial width and height, in cells")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (run->parsed()) return cmd_run(config, err);
  if (batch->parsed()) return cmd_batch(config, err);
  if (compare->parsed()) return cmd_compare(config, err);
  return cmd_synth(config, err);
}

}  // namespace rost::cli
