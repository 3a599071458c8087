#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace coe::text {

using Tokens = std::vector<std::string>;

struct TokenizerConfig {
  bool lowercase = true;
  bool punctuation_split = true;
  bool unicode_normalize = true;  // NFC

  nlohmann::json to_json() const;
  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

/// Whitespace tokenization. With punctuation_split, leading and trailing
/// punctuation characters of each whitespace chunk become single-character
/// tokens; inner punctuation ("don't", "u.s") stays attached.
Tokens tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Unicode-aware lowercasing (root locale), the same mapping tokenize uses.
std::string lowercase(std::string_view text);

/// Porter (1980) suffix stripping. Expects a lowercase token; tokens of
/// length <= 2 are returned unchanged.
std::string stem(std::string_view token);

/// Multiset of contiguous n-token windows.
class NgramMultiset {
 public:
  using Ngram = std::vector<std::string>;
  using Counts = std::map<Ngram, std::size_t>;

  explicit NgramMultiset(std::size_t order) : order_(order) {}

  std::size_t order() const { return order_; }
  /// Sum of counts, i.e. the number of windows.
  std::size_t total() const { return total_; }
  std::size_t distinct() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  std::size_t count(const Ngram& gram) const;
  const Counts& counts() const { return counts_; }

  void add(Ngram gram, std::size_t times = 1);

 private:
  std::size_t order_;
  std::size_t total_ = 0;
  Counts counts_;
};

/// Counts every window of n tokens. Throws std::invalid_argument when n == 0.
NgramMultiset ngrams(std::span<const std::string> tokens, std::size_t n);

/// Word -> synonym-set ids, read from "word<TAB>set_id" lines.
class SynonymTable {
 public:
  SynonymTable() = default;

  /// Blank lines and lines starting with '#' are skipped. Words are lowercased.
  static SynonymTable parse(std::string_view content);
  static SynonymTable load(const std::filesystem::path& path);

  void add(std::string word, std::string set_id);
  /// True when the two words share at least one set id.
  bool synonyms(const std::string& a, const std::string& b) const;
  std::size_t size() const { return sets_.size(); }

 private:
  std::unordered_map<std::string, std::set<std::string>> sets_;
};

}  // namespace coe::text
