#include <cmath>
#include <map>

#include <fmt/format.h>

#include "coe/corpus.hpp"
#include "coe/error.hpp"

namespace coe::corpus {
namespace {

struct Allocation {
  std::size_t train;
  std::size_t validation;
  std::size_t test;
};

// floor() with a guard against products like 0.7 * 10 = 6.999...
std::size_t floor_share(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
}

Allocation allocate(std::size_t n, const SplitRatios& ratios) {
  Allocation a{};
  a.validation = floor_share(n, ratios.validation);
  a.test = floor_share(n, ratios.test);
  a.train = n - a.validation - a.test;
  return a;
}

void validate(const SplitRatios& r) {
  if (!(r.train > 0.0) || !(r.validation > 0.0) || !(r.test > 0.0)) {
    throw InputError("split ratios must all be positive");
  }
  const double sum = r.train + r.validation + r.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InputError(fmt::format("split ratios sum to {}, expected 1", sum));
  }
}

void deal(std::span<const HateRecord> records, std::span<const std::size_t> order,
          const Allocation& a, CorpusSplit& out) {
  std::size_t k = 0;
  for (; k < a.train; ++k) out.train.push_back(records[order[k]]);
  for (; k < a.train + a.validation; ++k) out.validation.push_back(records[order[k]]);
  for (; k < order.size(); ++k) out.test.push_back(records[order[k]]);
}

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  std::uint64_t x = next();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  SplitMix64 rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  return perm;
}

CorpusSplit split_corpus(std::span<const HateRecord> records, const SplitRatios& ratios,
                         std::uint64_t seed, bool stratify) {
  validate(ratios);
  if (records.empty()) throw InputError("cannot split an empty corpus");

  CorpusSplit out;
  out.seed = seed;
  out.ratios = ratios;
  const auto perm = seeded_permutation(records.size(), seed);

  if (!stratify) {
    deal(records, perm, allocate(records.size(), ratios), out);
    return out;
  }

  // Strata keep the shuffled order; they are visited in order of first
  // appearance in the shuffle.
  std::vector<std::string> stratum_order;
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t idx : perm) {
    auto [it, inserted] = strata.try_emplace(records[idx].category);
    if (inserted) stratum_order.push_back(records[idx].category);
    it->second.push_back(idx);
  }
  for (const std::string& key : stratum_order) {
    const auto& members = strata[key];
    deal(records, members, allocate(members.size(), ratios), out);
  }
  return out;
}

nlohmann::ordered_json CorpusSplit::manifest() const {
  auto ids = [](const std::vector<HateRecord>& part) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : part) arr.push_back(r.id);
    return arr;
  };
  nlohmann::ordered_json m;
  m["seed"] = seed;
  m["ratios"] = {ratios.train, ratios.validation, ratios.test};
  m["train"] = ids(train);
  m["validation"] = ids(validation);
  m["test"] = ids(test);
  return m;
}

}  // namespace coe::corpus
