#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rost/random.hpp"

namespace rost {

/// Refinement-time distributions P(t | T).
///
/// Timesteps in this module are 1-indexed: t ranges over 1..T where T is the
/// most recent observation. The pipeline converts to its 0-indexed timesteps.
enum class SchedulerVariant {
  Now,              // always the latest observation
  Uniform,          // 1/T
  AgeProportional,  // t / (T(T+1)/2)
  Exponential,      // geometric in T - t, truncated to [1, T]
  UniformNow,       // eta on T, the rest uniform over 1..T-1
  AgePNow,          // eta on T, the rest age-proportional over 1..T-1
  UniformExp,       // eta * exponential + (1 - eta) * uniform
  AgePExp,          // eta * exponential + (1 - eta) * age-proportional
};

inline constexpr std::array<SchedulerVariant, 8> kAllSchedulerVariants = {
    SchedulerVariant::Now,        SchedulerVariant::Uniform,    SchedulerVariant::AgeProportional,
    SchedulerVariant::Exponential, SchedulerVariant::UniformNow, SchedulerVariant::AgePNow,
    SchedulerVariant::UniformExp, SchedulerVariant::AgePExp,
};

struct SchedulerKind {
  SchedulerVariant variant = SchedulerVariant::Now;
  double q = 0.5;    // geometric parameter, 0 < q < 1
  double eta = 0.5;  // weight of the local component, 0 <= eta <= 1

  void validate() const;
};

/// CLI names: now, uniform, agep, exp, uniform_now, agep_now, uniform_exp, agep_exp.
std::string_view scheduler_name(SchedulerVariant variant);
std::optional<SchedulerVariant> parse_scheduler(std::string_view name);
/// Comma-separated list of every valid name, for error messages.
std::string scheduler_names();

/// P(t | T). Throws std::out_of_range unless 1 <= t <= T.
double pmf(const SchedulerKind& kind, std::int64_t t, std::int64_t T);

/// Draws t ~ P(t | T), T >= 1.
std::int64_t sample(const SchedulerKind& kind, std::int64_t T, Rng& rng);

/// Exact E{r(t)} after T observations with R rounds per interval:
/// R * sum_{s=t}^{T} P(t | s).
double expected_refinements(const SchedulerKind& kind, std::int64_t t, std::int64_t T, double R);

}  // namespace rost
