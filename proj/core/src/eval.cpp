#include "rost/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rost {
namespace {

double mean_of(const TimeSeries& series) {
  if (series.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [t, v] : series) sum += v;
  return sum / static_cast<double>(series.size());
}

bool same_timesteps(const TimeSeries& a, const TimeSeries& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first) return false;
  }
  return true;
}

double entropy(const std::map<TopicId, std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double perplexity(const Model& model, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw std::invalid_argument("perplexity of an empty token set");
  const std::size_t K = model.topics();
  const TopicCounts& counts = model.counts();

  std::map<CellKey, std::vector<double>> theta_cache;
  double log_sum = 0.0;
  for (TokenId id : tokens) {
    const WordToken& tok = model.token(id);
    const CellKey key = model.cell_of(tok.pos);
    auto it = theta_cache.find(key);
    if (it == theta_cache.end()) it = theta_cache.emplace(key, model.theta(key)).first;
    const auto& theta = it->second;

    double p = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      p += counts.phi_entry(static_cast<TopicId>(k), tok.word) * theta[k];
    }
    log_sum += std::log(p);
  }
  return std::exp(-log_sum / static_cast<double>(tokens.size()));
}

double instantaneous_ppx(const Model& model, Timestep t) {
  if (t < 0 || t >= model.num_timesteps()) {
    throw std::out_of_range("timestep " + std::to_string(t) + " has not been observed");
  }
  return perplexity(model, model.tokens_at(t));
}

double nmi(std::span<const TopicId> labels_a, std::span<const TopicId> labels_b) {
  if (labels_a.size() != labels_b.size()) throw std::invalid_argument("nmi: label lengths differ");
  if (labels_a.empty()) throw std::invalid_argument("nmi: empty labelings");

  std::map<TopicId, std::size_t> ca, cb;
  std::map<std::pair<TopicId, TopicId>, std::size_t> joint;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    ++ca[labels_a[i]];
    ++cb[labels_b[i]];
    ++joint[{labels_a[i], labels_b[i]}];
  }
  const double n = static_cast<double>(labels_a.size());
  const double ha = entropy(ca, n);
  const double hb = entropy(cb, n);
  if (ha <= 0.0 || hb <= 0.0) return (ha <= 0.0 && hb <= 0.0) ? 1.0 : 0.0;

  double mi = 0.0;
  for (const auto& [pair, c] : joint) {
    const double pab = static_cast<double>(c) / n;
    const double pa = static_cast<double>(ca[pair.first]) / n;
    const double pb = static_cast<double>(cb[pair.second]) / n;
    mi += pab * std::log(pab / (pa * pb));
  }
  const double score = mi / std::sqrt(ha * hb);
  return std::clamp(score, 0.0, 1.0);
}

PerplexityTrace mean_trace(std::span<const PerplexityTrace> traces) {
  if (traces.empty()) throw std::invalid_argument("mean_trace: no traces");
  PerplexityTrace out = traces.front();
  for (std::size_t i = 1; i < traces.size(); ++i) {
    const auto& tr = traces[i];
    if (!same_timesteps(out.instant, tr.instant) || !same_timesteps(out.final_by_t, tr.final_by_t)) {
      throw std::invalid_argument("mean_trace: traces cover different timesteps");
    }
    for (std::size_t j = 0; j < tr.instant.size(); ++j) out.instant[j].second += tr.instant[j].second;
    for (std::size_t j = 0; j < tr.final_by_t.size(); ++j) {
      out.final_by_t[j].second += tr.final_by_t[j].second;
    }
    out.final_ppx += tr.final_ppx;
  }
  const double n = static_cast<double>(traces.size());
  for (auto& [t, v] : out.instant) v /= n;
  for (auto& [t, v] : out.final_by_t) v /= n;
  out.final_ppx /= n;
  out.batch_ratio_instant.reset();
  out.batch_ratio_final.reset();
  return out;
}

const ComparisonRow* ComparisonTable::find(std::string_view scheduler) const {
  for (const auto& row : rows) {
    if (row.scheduler == scheduler) return &row;
  }
  return nullptr;
}

ComparisonTable compare_report(const std::vector<std::pair<std::string, PerplexityTrace>>& traces,
                               const PerplexityTrace& batch, double budget) {
  const double batch_instant = mean_of(batch.instant);
  const double batch_final = batch.final_by_t.empty() ? batch.final_ppx : mean_of(batch.final_by_t);

  ComparisonTable table;
  for (const auto& [name, trace] : traces) {
    if (!same_timesteps(trace.instant, batch.instant) ||
        !same_timesteps(trace.final_by_t, batch.final_by_t)) {
      throw std::invalid_argument("compare_report: trace '" + name +
                                  "' covers a different stream than the batch baseline");
    }
    ComparisonRow row;
    row.scheduler = name;
    row.budget = budget;
    row.mean_instant_ppx = mean_of(trace.instant);
    row.mean_final_ppx = trace.final_by_t.empty() ? trace.final_ppx : mean_of(trace.final_by_t);
    row.instant_ratio = row.mean_instant_ppx / batch_instant;
    row.final_ratio = row.mean_final_ppx / batch_final;
    table.rows.push_back(row);

    RatioSeries series{name, {}};
    for (std::size_t i = 0; i < trace.instant.size(); ++i) {
      RatioPoint pt;
      pt.t = trace.instant[i].first;
      pt.instant_ratio = trace.instant[i].second / batch.instant[i].second;
      pt.final_ratio = trace.final_by_t[i].second / batch.final_by_t[i].second;
      series.points.push_back(pt);
    }
    table.per_timestep.push_back(std::move(series));
  }

  ComparisonRow batch_row;
  batch_row.scheduler = "batch";
  batch_row.budget = budget;
  batch_row.mean_instant_ppx = batch_instant;
  batch_row.mean_final_ppx = batch_final;
  table.rows.push_back(batch_row);
  return table;
}

}  // namespace rost
