#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/lexmetrics.hpp"

namespace coe::metrics {
namespace {

// Brevity factor is 0.5 when the length ratio is 2/3.
const double kNistBeta = std::log(0.5) / std::pow(std::log(1.5), 2);

}  // namespace

double nist_brevity_factor(double ratio) {
  if (ratio >= 1.0) return 1.0;
  if (ratio <= 0.0) return 0.0;
  const double l = std::log(ratio);
  return std::exp(kNistBeta * l * l);
}

NistScorer::Stats& NistScorer::Stats::operator+=(const Stats& other) {
  if (info_sum.size() < other.info_sum.size()) {
    info_sum.resize(other.info_sum.size(), 0.0);
    hyp_ngrams.resize(other.hyp_ngrams.size(), 0);
  }
  for (std::size_t i = 0; i < other.info_sum.size(); ++i) {
    info_sum[i] += other.info_sum[i];
    hyp_ngrams[i] += other.hyp_ngrams[i];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  return *this;
}

NistScorer::NistScorer(std::span<const Tokens> references, std::size_t max_n)
    : max_n_(max_n), references_(references.begin(), references.end()) {
  if (max_n == 0) throw InputError("NIST order must be >= 1");
  for (const Tokens& ref : references_) {
    total_words_ += ref.size();
    for (std::size_t n = 1; n <= max_n_; ++n) {
      const auto grams = text::ngrams(ref, n);
      for (const auto& [gram, count] : grams.counts()) counts_[gram] += count;
    }
  }
  if (total_words_ == 0) throw InputError("NIST needs a nonempty reference corpus");
}

double NistScorer::info(TokenSpan ngram) const {
  if (ngram.empty() || ngram.size() > max_n_) return 0.0;
  const text::NgramMultiset::Ngram key(ngram.begin(), ngram.end());
  auto it = counts_.find(key);
  if (it == counts_.end()) return 0.0;
  double prefix = static_cast<double>(total_words_);
  if (ngram.size() > 1) {
    const text::NgramMultiset::Ngram head(ngram.begin(), ngram.end() - 1);
    prefix = static_cast<double>(counts_.at(head));
  }
  return std::log2(prefix / static_cast<double>(it->second));
}

NistScorer::Stats NistScorer::stats(TokenSpan hyp, TokenSpan ref) const {
  Stats s;
  s.info_sum.assign(max_n_, 0.0);
  s.hyp_ngrams.assign(max_n_, 0);
  s.hyp_length = hyp.size();
  s.ref_length = ref.size();
  for (std::size_t n = 1; n <= max_n_; ++n) {
    const text::NgramMultiset h = text::ngrams(hyp, n);
    const text::NgramMultiset r = text::ngrams(ref, n);
    double sum = 0.0;
    for (const auto& [gram, count] : h.counts()) {
      const std::size_t matched = std::min(count, r.count(gram));
      if (matched > 0) sum += static_cast<double>(matched) * info(gram);
    }
    s.info_sum[n - 1] = sum;
    s.hyp_ngrams[n - 1] = h.total();
  }
  return s;
}

double NistScorer::score(const Stats& s) const {
  double total = 0.0;
  for (std::size_t i = 0; i < s.info_sum.size(); ++i) {
    if (s.hyp_ngrams[i] > 0) total += s.info_sum[i] / static_cast<double>(s.hyp_ngrams[i]);
  }
  const double ratio = s.ref_length == 0
                           ? (s.hyp_length == 0 ? 0.0 : 1.0)
                           : static_cast<double>(s.hyp_length) / static_cast<double>(s.ref_length);
  return total * nist_brevity_factor(ratio);
}

MetricScore NistScorer::sentence(TokenSpan hyp, TokenSpan ref) const {
  const double raw = score(stats(hyp, ref));
  return MetricScore{Metric::kNist, raw, std::nullopt, raw * 10.0};
}

MetricScore NistScorer::corpus(std::span<const Tokens> hyps) const {
  if (hyps.size() != references_.size()) {
    throw InputError(fmt::format("NIST corpus: {} hypotheses for {} references", hyps.size(),
                                 references_.size()));
  }
  Stats total;
  total.info_sum.assign(max_n_, 0.0);
  total.hyp_ngrams.assign(max_n_, 0);
  for (std::size_t i = 0; i < hyps.size(); ++i) total += stats(hyps[i], references_[i]);
  const double raw = score(total);
  return MetricScore{Metric::kNist, raw, std::nullopt, raw * 10.0};
}

}  // namespace coe::metrics
