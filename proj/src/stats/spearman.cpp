#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/stats.hpp"

namespace coe::stats {
namespace {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InputError(fmt::format("spearman: length mismatch {} vs {}", x.size(), y.size()));
  }
  if (x.size() < 3) throw InputError("spearman needs at least three pairs");
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  SpearmanResult result;
  result.n = x.size();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  result.rho = pearson(rx, ry);
  if (!result.rho) return result;

  const double rho = *result.rho;
  if (std::abs(rho) >= 1.0) {
    result.p_value = 0.0;
    return result;
  }
  const double df = static_cast<double>(result.n) - 2.0;
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  const boost::math::students_t dist(df);
  result.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return result;
}

double spearman_exact_p(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  if (x.size() > 10) throw InputError("exact spearman p-value limited to n <= 10");
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  const auto observed = pearson(rx, ry);
  if (!observed) throw ComputeError("spearman: zero variance in ranks");
  const double threshold = std::abs(*observed) - 1e-12;

  std::sort(ry.begin(), ry.end());
  std::size_t hits = 0;
  std::size_t total = 0;
  // With tied y ranks next_permutation visits each distinct ordering once;
  // every distinct ordering stands for the same number of raw permutations,
  // so the ratio is unchanged.
  do {
    ++total;
    const auto rho = pearson(rx, ry);
    if (rho && std::abs(*rho) >= threshold) ++hits;
  } while (std::next_permutation(ry.begin(), ry.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

CorrelationTable correlate_metrics(std::span<const ConsensusSample> consensus,
                                   const PerSampleScores& scores,
                                   std::span<const Metric> metric_set, double significance) {
  CorrelationTable table;
  table.significance = significance;
  std::vector<const ConsensusSample*> retained;
  for (const auto& s : consensus) {
    if (s.retained) retained.push_back(&s);
  }
  for (Metric m : metric_set) {
    std::vector<double> metric_values;
    metric_values.reserve(retained.size());
    for (const auto* s : retained) {
      auto it = scores.find(s->sample_id);
      if (it == scores.end()) {
        throw InputError(fmt::format("no scores for retained sample '{}'", s->sample_id));
      }
      const auto& v = it->second[m];
      if (!v) {
        throw InputError(fmt::format("sample '{}' has no {} score", s->sample_id, metric_code(m)));
      }
      metric_values.push_back(*v);
    }
    CorrelationRow row{m, {}};
    for (std::size_t d = 0; d < kDimensions.size(); ++d) {
      std::vector<double> human;
      human.reserve(retained.size());
      for (const auto* s : retained) human.push_back(s->median(kDimensions[d]));
      const SpearmanResult r = spearman(metric_values, human);
      CorrelationCell& cell = row.cells[d];
      cell.rho = r.rho;
      cell.p_value = r.p_value;
      cell.n = r.n;
      cell.significant = r.p_value.has_value() && *r.p_value < significance;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace coe::stats
