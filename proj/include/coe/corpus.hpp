#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace coe::corpus {

/// One annotated post.
struct HateRecord {
  std::string id;
  std::string text;
  bool hate_label = true;
  std::string target_group;
  /// Set when the source explicitly marks the target as unknown (null target
  /// or a true target_unknown flag). Only then may target_group be empty.
  bool target_unknown = false;
  std::string implied_statement;
  /// Optional hate category, used only for stratified splits.
  std::string category;

  friend bool operator==(const HateRecord&, const HateRecord&) = default;
};

/// Canonical field -> source JSON key. Defaults follow the public dataset's
/// column names.
struct SchemaMap {
  std::string id = "id";
  std::string text = "post";
  std::string hate_label = "class";
  std::string target_group = "target";
  std::string implied_statement = "implied_statement";
  std::string target_unknown = "target_unknown";
  std::string category = "implicit_class";

  /// Applies overrides such as "text=tweet,target_group=group" to the defaults.
  /// Throws InputError on an unknown canonical name.
  static SchemaMap parse(std::string_view overrides);
  nlohmann::json to_json() const;
};

struct Rejection {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct LoadResult {
  std::vector<HateRecord> records;
  std::vector<Rejection> rejections;
  std::size_t line_count = 0;
};

/// Parses JSON Lines. Never throws on record-level problems: every line ends
/// up either accepted or rejected, so records + rejections == line_count.
LoadResult parse_corpus(std::string_view content, const SchemaMap& schema = {});

/// Throws IoError when the file cannot be read.
LoadResult load_corpus(const std::filesystem::path& path, const SchemaMap& schema = {});

/// {"line": int, "reason": string} per rejection.
std::string rejections_to_jsonl(std::span<const Rejection> rejections);

struct SplitRatios {
  double train = 0.75;
  double validation = 0.125;
  double test = 0.125;

  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

struct CorpusSplit {
  std::vector<HateRecord> train;
  std::vector<HateRecord> validation;
  std::vector<HateRecord> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  /// {"seed", "ratios", "train", "validation", "test"} with id lists.
  nlohmann::ordered_json manifest() const;
};

/// SplitMix64 (Steele, Lea & Flood 2014): state += 0x9E3779B97F4A7C15, then
/// the two xor-shift-multiply rounds with 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform integer in [0, bound), Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Fisher-Yates permutation of 0..n-1: for i from n-1 down to 1 swap i with
/// below(i + 1).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Seeded shuffle, then validation = floor(n * r_val), test = floor(n * r_test),
/// remainder to train. With stratify, allocation runs per category.
/// Throws InputError when the corpus is empty or the ratios are invalid.
CorpusSplit split_corpus(std::span<const HateRecord> records, const SplitRatios& ratios,
                         std::uint64_t seed, bool stratify = false);

}  // namespace coe::corpus
