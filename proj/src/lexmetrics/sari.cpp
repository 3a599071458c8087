#include <algorithm>

#include "coe/lexmetrics.hpp"

namespace coe::metrics {
namespace {

using Counter = text::NgramMultiset::Counts;

Counter scaled(const Counter& c, std::size_t factor) {
  Counter out;
  for (const auto& [g, n] : c) out.emplace(g, n * factor);
  return out;
}

// Multiset intersection: min of counts, zero entries dropped.
Counter intersect(const Counter& a, const Counter& b) {
  Counter out;
  for (const auto& [g, n] : a) {
    auto it = b.find(g);
    if (it != b.end()) out.emplace(g, std::min(n, it->second));
  }
  return out;
}

// Multiset difference: positive part of a - b.
Counter subtract(const Counter& a, const Counter& b) {
  Counter out;
  for (const auto& [g, n] : a) {
    auto it = b.find(g);
    const std::size_t other = it == b.end() ? 0 : it->second;
    if (n > other) out.emplace(g, n - other);
  }
  return out;
}

std::size_t count_of(const Counter& c, const text::NgramMultiset::Ngram& g) {
  auto it = c.find(g);
  return it == c.end() ? 0 : it->second;
}

std::size_t sum_of(const Counter& c) {
  std::size_t s = 0;
  for (const auto& [g, n] : c) s += n;
  return s;
}

// 0/0 is 1 only when nothing was expected and nothing was performed.
double ratio_or_convention(double numerator, double denominator, bool other_side_empty) {
  if (denominator > 0.0) return numerator / denominator;
  return other_side_empty ? 1.0 : 0.0;
}

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

struct OrderScores {
  double keep_f1;
  double delete_precision;
  double add_f1;
};

OrderScores score_order(TokenSpan source, TokenSpan hyp, std::span<const Tokens> refs,
                        std::size_t n) {
  const std::size_t num_refs = std::max<std::size_t>(refs.size(), 1);
  const Counter s = scaled(text::ngrams(source, n).counts(), num_refs);
  const Counter c = scaled(text::ngrams(hyp, n).counts(), num_refs);
  Counter r;
  for (const Tokens& ref : refs) {
    const auto grams = text::ngrams(ref, n);
    for (const auto& [g, k] : grams.counts()) r[g] += k;
  }

  // keep: n-grams of the source retained in the output
  const Counter keep = intersect(s, c);
  const Counter keep_good = intersect(keep, r);
  const Counter keep_all = intersect(s, r);
  double keep_ratio_sum = 0.0;
  for (const auto& [g, k] : keep) {
    keep_ratio_sum += static_cast<double>(count_of(keep_good, g)) / static_cast<double>(k);
  }
  const double keep_p = ratio_or_convention(keep_ratio_sum, static_cast<double>(keep.size()),
                                            keep_all.empty());
  const double keep_r = ratio_or_convention(static_cast<double>(sum_of(keep_good)),
                                            static_cast<double>(sum_of(keep_all)), keep.empty());

  // delete: n-grams of the source dropped from the output
  const Counter del = subtract(s, c);
  const Counter del_good = subtract(del, r);
  const Counter del_all = subtract(s, r);
  double del_ratio_sum = 0.0;
  for (const auto& [g, k] : del) {
    del_ratio_sum += static_cast<double>(count_of(del_good, g)) / static_cast<double>(k);
  }
  const double del_p =
      ratio_or_convention(del_ratio_sum, static_cast<double>(del.size()), del_all.empty());

  // add: n-gram types in the output that are not in the source (set based)
  std::size_t added = 0;
  std::size_t added_good = 0;
  for (const auto& [g, k] : c) {
    if (s.count(g) != 0) continue;
    ++added;
    if (r.count(g) != 0) ++added_good;
  }
  std::size_t add_expected = 0;
  for (const auto& [g, k] : r) {
    if (s.count(g) == 0) ++add_expected;
  }
  const double add_p = ratio_or_convention(static_cast<double>(added_good),
                                           static_cast<double>(added), add_expected == 0);
  const double add_r = ratio_or_convention(static_cast<double>(added_good),
                                           static_cast<double>(add_expected), added == 0);

  return {f1(keep_p, keep_r), del_p, f1(add_p, add_r)};
}

}  // namespace

SariBreakdown sari_breakdown(TokenSpan source, TokenSpan hyp, std::span<const Tokens> refs,
                             std::size_t max_n) {
  SariBreakdown out;
  if (max_n == 0) return out;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const OrderScores o = score_order(source, hyp, refs, n);
    out.keep_f1 += o.keep_f1;
    out.delete_precision += o.delete_precision;
    out.add_f1 += o.add_f1;
  }
  const auto orders = static_cast<double>(max_n);
  out.keep_f1 /= orders;
  out.delete_precision /= orders;
  out.add_f1 /= orders;
  out.score = (out.keep_f1 + out.delete_precision + out.add_f1) / 3.0;
  return out;
}

MetricScore sari(TokenSpan source, TokenSpan hyp, std::span<const Tokens> refs, std::size_t max_n) {
  return MetricScore{Metric::kSari, 100.0 * sari_breakdown(source, hyp, refs, max_n).score,
                     std::nullopt, std::nullopt};
}

}  // namespace coe::metrics
