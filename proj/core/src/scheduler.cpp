#include "rost/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rost {
namespace {

struct NamedVariant {
  SchedulerVariant variant;
  std::string_view name;
};

constexpr std::array<NamedVariant, 8> kNames = {{
    {SchedulerVariant::Now, "now"},
    {SchedulerVariant::Uniform, "uniform"},
    {SchedulerVariant::AgeProportional, "agep"},
    {SchedulerVariant::Exponential, "exp"},
    {SchedulerVariant::UniformNow, "uniform_now"},
    {SchedulerVariant::AgePNow, "agep_now"},
    {SchedulerVariant::UniformExp, "uniform_exp"},
    {SchedulerVariant::AgePExp, "agep_exp"},
}};

double uniform_pmf(std::int64_t n) { return 1.0 / static_cast<double>(n); }

// t / (1 + 2 + ... + n)
double age_pmf(std::int64_t t, std::int64_t n) {
  return 2.0 * static_cast<double>(t) / (static_cast<double>(n) * static_cast<double>(n + 1));
}

// Geometric in the age T - t, renormalized over the T observed timesteps.
double exp_pmf(double q, std::int64_t t, std::int64_t T) {
  const double mass = -std::expm1(static_cast<double>(T) * std::log1p(-q));
  return q * std::pow(1.0 - q, static_cast<double>(T - t)) / mass;
}

std::int64_t sample_uniform(std::int64_t n, Rng& rng) {
  return 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
}

// Smallest t with t(t+1)/2 > m, for m drawn uniformly from [0, n(n+1)/2).
std::int64_t sample_age(std::int64_t n, Rng& rng) {
  const auto total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n + 1) / 2;
  const std::uint64_t m = rng.below(total);
  auto tri = [](std::uint64_t j) { return j * (j + 1) / 2; };
  auto j = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(m) + 1.0) - 1.0) / 2.0);
  while (j > 0 && tri(j) > m) --j;
  while (tri(j + 1) <= m) ++j;
  return static_cast<std::int64_t>(j + 1);
}

std::int64_t sample_exp(double q, std::int64_t T, Rng& rng) {
  const double log_keep = std::log1p(-q);
  const double mass = -std::expm1(static_cast<double>(T) * log_keep);
  const double u = rng.uniform01();
  const double age = std::floor(std::log1p(-u * mass) / log_keep);
  const auto clamped = static_cast<std::int64_t>(std::clamp(age, 0.0, static_cast<double>(T - 1)));
  return T - clamped;
}

}  // namespace

void SchedulerKind::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
}

std::string_view scheduler_name(SchedulerVariant variant) {
  for (const auto& entry : kNames) {
    if (entry.variant == variant) return entry.name;
  }
  return "unknown";
}

std::optional<SchedulerVariant> parse_scheduler(std::string_view name) {
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.variant;
  }
  return std::nullopt;
}

std::string scheduler_names() {
  std::string out;
  for (const auto& entry : kNames) {
    if (!out.empty()) out += ", ";
    out += entry.name;
  }
  return out;
}

double pmf(const SchedulerKind& kind, std::int64_t t, std::int64_t T) {
  if (T < 1 || t < 1 || t > T) {
    throw std::out_of_range("scheduler pmf requires 1 <= t <= T (t=" + std::to_string(t) +
                            ", T=" + std::to_string(T) + ")");
  }
  const double eta = kind.eta;
  switch (kind.variant) {
    case SchedulerVariant::Now:
      return t == T ? 1.0 : 0.0;
    case SchedulerVariant::Uniform:
      return uniform_pmf(T);
    case SchedulerVariant::AgeProportional:
      return age_pmf(t, T);
    case SchedulerVariant::Exponential:
      return exp_pmf(kind.q, t, T);
    case SchedulerVariant::UniformNow:
      if (T == 1) return 1.0;
      return t == T ? eta : (1.0 - eta) * uniform_pmf(T - 1);
    case SchedulerVariant::AgePNow:
      if (T == 1) return 1.0;
      return t == T ? eta : (1.0 - eta) * age_pmf(t, T - 1);
    case SchedulerVariant::UniformExp:
      return eta * exp_pmf(kind.q, t, T) + (1.0 - eta) * uniform_pmf(T);
    case SchedulerVariant::AgePExp:
      return eta * exp_pmf(kind.q, t, T) + (1.0 - eta) * age_pmf(t, T);
  }
  throw std::logic_error("unhandled scheduler variant");
}

std::int64_t sample(const SchedulerKind& kind, std::int64_t T, Rng& rng) {
  if (T < 1) throw std::out_of_range("scheduler sample requires T >= 1");
  if (T == 1) return 1;

  // Mixtures draw their component first; each component is sampled exactly.
  auto local_first = [&] { return rng.uniform01() < kind.eta; };
  switch (kind.variant) {
    case SchedulerVariant::Now:
      return T;
    case SchedulerVariant::Uniform:
      return sample_uniform(T, rng);
    case SchedulerVariant::AgeProportional:
      return sample_age(T, rng);
    case SchedulerVariant::Exponential:
      return sample_exp(kind.q, T, rng);
    case SchedulerVariant::UniformNow:
      return local_first() ? T : sample_uniform(T - 1, rng);
    case SchedulerVariant::AgePNow:
      return local_first() ? T : sample_age(T - 1, rng);
    case SchedulerVariant::UniformExp:
      return local_first() ? sample_exp(kind.q, T, rng) : sample_uniform(T, rng);
    case SchedulerVariant::AgePExp:
      return local_first() ? sample_exp(kind.q, T, rng) : sample_age(T, rng);
  }
  throw std::logic_error("unhandled scheduler variant");
}

double expected_refinements(const SchedulerKind& kind, std::int64_t t, std::int64_t T, double R) {
  if (T < 1 || t < 1 || t > T) throw std::out_of_range("expected_refinements requires 1 <= t <= T");
  double sum = 0.0;
  for (std::int64_t s = t; s <= T; ++s) sum += pmf(kind, t, s);
  return R * sum;
}

}  // namespace rost
