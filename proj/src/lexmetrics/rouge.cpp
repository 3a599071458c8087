#include <algorithm>

#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/lexmetrics.hpp"

namespace coe::metrics {
namespace {

Prf harmonic(std::size_t overlap, std::size_t hyp_total, std::size_t ref_total) {
  Prf prf;
  if (hyp_total > 0) prf.precision = static_cast<double>(overlap) / static_cast<double>(hyp_total);
  if (ref_total > 0) prf.recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  if (prf.precision + prf.recall > 0.0) {
    prf.f1 = 2.0 * prf.precision * prf.recall / (prf.precision + prf.recall);
  }
  return prf;
}

MetricScore to_score(Metric metric, const Prf& prf) {
  return MetricScore{metric, 100.0 * prf.f1, prf, std::nullopt};
}

}  // namespace

MetricScore rouge_n(TokenSpan hyp, TokenSpan ref, std::size_t n) {
  if (n != 1 && n != 2) throw InputError(fmt::format("ROUGE-N order {} not in {{1,2}}", n));
  const Metric metric = n == 1 ? Metric::kRouge1 : Metric::kRouge2;
  const text::NgramMultiset h = text::ngrams(hyp, n);
  const text::NgramMultiset r = text::ngrams(ref, n);
  if (h.total() == 0 && r.total() == 0) return to_score(metric, Prf{1.0, 1.0, 1.0});

  std::size_t overlap = 0;
  for (const auto& [gram, count] : h.counts()) overlap += std::min(count, r.count(gram));
  return to_score(metric, harmonic(overlap, h.total(), r.total()));
}

std::size_t lcs_length(TokenSpan a, TokenSpan b) {
  if (a.size() < b.size()) std::swap(a, b);
  // b is the shorter sequence; rows run over a.
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

MetricScore rouge_l(TokenSpan hyp, TokenSpan ref) {
  if (hyp.empty() && ref.empty()) return to_score(Metric::kRougeL, Prf{1.0, 1.0, 1.0});
  return to_score(Metric::kRougeL, harmonic(lcs_length(hyp, ref), hyp.size(), ref.size()));
}

}  // namespace coe::metrics
