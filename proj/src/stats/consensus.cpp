#include <algorithm>
#include <map>

#include "coe/error.hpp"
#include "coe/stats.hpp"

namespace coe::stats {

std::size_t ConsensusResult::retained_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.retained; }));
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

ConsensusResult aggregate_consensus(std::span<const AnnotationRecord> annotations, int min_raters,
                                    int disagreement_threshold) {
  if (min_raters < 1) throw InputError("min_raters must be >= 1");
  if (disagreement_threshold < 0) throw InputError("disagreement threshold must be >= 0");

  std::map<std::string, std::vector<const AnnotationRecord*>> by_sample;
  for (const auto& a : annotations) by_sample[a.sample_id].push_back(&a);

  ConsensusResult result;
  for (const auto& [id, group] : by_sample) {
    const int n = static_cast<int>(group.size());
    if (n < min_raters) {
      result.dropped.push_back({id, n});
      continue;
    }
    ConsensusSample sample;
    sample.sample_id = id;
    sample.n_raters = n;
    for (HumanDimension d : kDimensions) {
      std::vector<double> scores;
      scores.reserve(group.size());
      for (const auto* a : group) scores.push_back(a->score(d));
      const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
      if (*hi - *lo > disagreement_threshold) sample.retained = false;
      const double m = median(std::move(scores));
      if (d == HumanDimension::kInformativeness) {
        sample.median_informativeness = m;
      } else {
        sample.median_clarity = m;
      }
    }
    result.samples.push_back(std::move(sample));
  }
  return result;
}

}  // namespace coe::stats
