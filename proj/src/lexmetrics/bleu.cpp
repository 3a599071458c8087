#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/lexmetrics.hpp"

namespace coe::metrics {

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  max_n = std::max(max_n, other.max_n);
  for (std::size_t i = 0; i < kMaxBleuOrder; ++i) {
    matches[i] += other.matches[i];
    totals[i] += other.totals[i];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

std::size_t closest_ref_length(std::size_t hyp_length, std::span<const Tokens> refs) {
  std::size_t best = 0;
  std::size_t best_diff = 0;
  bool first = true;
  for (const Tokens& ref : refs) {
    const std::size_t len = ref.size();
    const std::size_t diff = len > hyp_length ? len - hyp_length : hyp_length - len;
    if (first || diff < best_diff || (diff == best_diff && len < best)) {
      best = len;
      best_diff = diff;
      first = false;
    }
  }
  return best;
}

BleuStats bleu_stats(TokenSpan hyp, std::span<const Tokens> refs, std::size_t max_n) {
  if (max_n == 0 || max_n > kMaxBleuOrder) {
    throw InputError(fmt::format("BLEU order {} outside 1..{}", max_n, kMaxBleuOrder));
  }
  BleuStats stats;
  stats.max_n = max_n;
  stats.hyp_length = hyp.size();
  stats.ref_length = closest_ref_length(hyp.size(), refs);
  for (std::size_t n = 1; n <= max_n; ++n) {
    const text::NgramMultiset hyp_grams = text::ngrams(hyp, n);
    std::vector<text::NgramMultiset> ref_grams;
    ref_grams.reserve(refs.size());
    for (const Tokens& ref : refs) ref_grams.push_back(text::ngrams(ref, n));

    std::size_t matched = 0;
    for (const auto& [gram, count] : hyp_grams.counts()) {
      std::size_t max_ref = 0;
      for (const auto& rg : ref_grams) max_ref = std::max(max_ref, rg.count(gram));
      matched += std::min(count, max_ref);
    }
    stats.matches[n - 1] = matched;
    stats.totals[n - 1] = hyp_grams.total();
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats, Smoothing smoothing, double epsilon) {
  if (stats.hyp_length == 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= stats.max_n; ++n) {
    const std::size_t total = stats.totals[n - 1];
    if (total == 0) continue;
    double p = static_cast<double>(stats.matches[n - 1]) / static_cast<double>(total);
    if (stats.matches[n - 1] == 0) {
      if (smoothing == Smoothing::kNone) return 0.0;
      p = epsilon;
    }
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double c = static_cast<double>(stats.hyp_length);
  const double r = static_cast<double>(stats.ref_length);
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return brevity * std::exp(log_sum / static_cast<double>(orders));
}

MetricScore bleu(TokenSpan hyp, std::span<const Tokens> refs, std::size_t max_n,
                 Smoothing smoothing, double epsilon) {
  if (max_n != 1 && max_n != 2) throw InputError(fmt::format("BLEU order {} not in {{1,2}}", max_n));
  MetricScore score;
  score.metric = max_n == 1 ? Metric::kBleu1 : Metric::kBleu2;
  score.value = 100.0 * bleu_from_stats(bleu_stats(hyp, refs, max_n), smoothing, epsilon);
  return score;
}

}  // namespace coe::metrics
