#include <algorithm>
#include <map>
#include <set>

#include "coe/error.hpp"
#include "coe/stats.hpp"

namespace coe::stats {

std::string_view level_name(AlphaLevel l) {
  switch (l) {
    case AlphaLevel::kNominal: return "nominal";
    case AlphaLevel::kOrdinal: return "ordinal";
    case AlphaLevel::kInterval: return "interval";
  }
  return "unknown";
}

std::optional<AlphaLevel> parse_level(std::string_view name) {
  for (AlphaLevel l : {AlphaLevel::kNominal, AlphaLevel::kOrdinal, AlphaLevel::kInterval}) {
    if (level_name(l) == name) return l;
  }
  return std::nullopt;
}

RatingMatrix rating_matrix(std::span<const AnnotationRecord> annotations, HumanDimension d,
                           const std::vector<std::string>* samples) {
  std::set<std::string> keep;
  if (samples != nullptr) keep.insert(samples->begin(), samples->end());
  std::map<std::string, std::size_t> unit_index;
  std::map<std::string, std::size_t> rater_index;
  for (const auto& a : annotations) {
    if (samples != nullptr && keep.count(a.sample_id) == 0) continue;
    unit_index.emplace(a.sample_id, 0);
    rater_index.emplace(a.rater_id, 0);
  }
  std::size_t k = 0;
  for (auto& [id, idx] : unit_index) idx = k++;
  k = 0;
  for (auto& [id, idx] : rater_index) idx = k++;

  RatingMatrix m(unit_index.size(), std::vector<std::optional<double>>(rater_index.size()));
  for (const auto& a : annotations) {
    auto u = unit_index.find(a.sample_id);
    if (u == unit_index.end()) continue;
    m[u->second][rater_index.at(a.rater_id)] = static_cast<double>(a.score(d));
  }
  return m;
}

double krippendorff_alpha(const RatingMatrix& units, AlphaLevel level) {
  std::vector<double> values;
  std::size_t pairable_units = 0;
  for (const auto& unit : units) {
    const auto m = std::count_if(unit.begin(), unit.end(), [](const auto& v) { return v.has_value(); });
    if (m < 2) continue;
    ++pairable_units;
    for (const auto& v : unit) {
      if (v) values.push_back(*v);
    }
  }
  if (pairable_units < 2) throw ComputeError("krippendorff alpha: insufficient pairable values");

  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t k = values.size();
  auto index_of_value = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin());
  };

  // Coincidence matrix: every ordered pair of ratings within a unit adds
  // 1 / (m_u - 1).
  std::vector<std::vector<double>> coincidence(k, std::vector<double>(k, 0.0));
  for (const auto& unit : units) {
    std::vector<std::size_t> idx;
    for (const auto& v : unit) {
      if (v) idx.push_back(index_of_value(*v));
    }
    if (idx.size() < 2) continue;
    const double weight = 1.0 / static_cast<double>(idx.size() - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (i != j) coincidence[idx[i]][idx[j]] += weight;
      }
    }
  }

  std::vector<double> marginal(k, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) marginal[c] += coincidence[c][d];
    n += marginal[c];
  }

  auto delta2 = [&](std::size_t c, std::size_t d) -> double {
    if (c == d) return 0.0;
    switch (level) {
      case AlphaLevel::kNominal:
        return 1.0;
      case AlphaLevel::kInterval: {
        const double diff = values[c] - values[d];
        return diff * diff;
      }
      case AlphaLevel::kOrdinal: {
        const std::size_t lo = std::min(c, d);
        const std::size_t hi = std::max(c, d);
        double span = 0.0;
        for (std::size_t g = lo; g <= hi; ++g) span += marginal[g];
        span -= (marginal[c] + marginal[d]) / 2.0;
        return span * span;
      }
    }
    return 0.0;
  };

  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      const double dist = delta2(c, d);
      observed += coincidence[c][d] * dist;
      expected += marginal[c] * marginal[d] * dist;
    }
  }
  if (observed == 0.0) return 1.0;
  return 1.0 - (n - 1.0) * observed / expected;
}

}  // namespace coe::stats
