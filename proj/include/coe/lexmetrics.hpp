#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "coe/metric.hpp"
#include "coe/textproc.hpp"

namespace coe::metrics {

using text::Tokens;
using TokenSpan = std::span<const std::string>;

/// Fractions in [0, 1].
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricScore {
  Metric metric = Metric::kBleu1;
  /// In the report range: 0..100 for everything except raw NIST.
  double value = 0.0;
  std::optional<Prf> components;
  /// NIST only: value * 10.
  std::optional<double> scaled;
};

// ---------------------------------------------------------------- BLEU

enum class Smoothing { kNone, kEpsilon };

inline constexpr std::size_t kMaxBleuOrder = 4;

/// Sufficient statistics; sums over sentences give corpus BLEU.
struct BleuStats {
  std::size_t max_n = 1;
  std::array<std::size_t, kMaxBleuOrder> matches{};  // clipped
  std::array<std::size_t, kMaxBleuOrder> totals{};   // hypothesis n-grams
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;  // closest reference length

  BleuStats& operator+=(const BleuStats& other);
};

/// Reference length closest to hyp_length; ties go to the shorter one.
std::size_t closest_ref_length(std::size_t hyp_length, std::span<const Tokens> refs);

BleuStats bleu_stats(TokenSpan hyp, std::span<const Tokens> refs, std::size_t max_n);

/// Geometric mean of the clipped precisions over orders 1..max_n the
/// hypothesis actually has (an order longer than the hypothesis is left out),
/// times exp(1 - r/c) when c < r. Zero precisions become epsilon under
/// kEpsilon and zero the score under kNone. Returns a fraction in [0, 1].
double bleu_from_stats(const BleuStats& stats, Smoothing smoothing, double epsilon = 1e-9);

/// Sentence BLEU scaled to 0..100. max_n must be 1 or 2.
MetricScore bleu(TokenSpan hyp, std::span<const Tokens> refs, std::size_t max_n,
                 Smoothing smoothing = Smoothing::kEpsilon, double epsilon = 1e-9);

// ---------------------------------------------------------------- ROUGE

/// ROUGE-N with clipped overlap. When neither side has an n-gram of order n
/// the comparison is vacuous and scores 100; otherwise 0/0 gives 0.
MetricScore rouge_n(TokenSpan hyp, TokenSpan ref, std::size_t n);

/// Longest common subsequence length, O(|a||b|) time, O(min) memory.
std::size_t lcs_length(TokenSpan a, TokenSpan b);

/// LCS-based ROUGE-L F1. Two empty sequences score 100, one empty scores 0.
MetricScore rouge_l(TokenSpan hyp, TokenSpan ref);

// ---------------------------------------------------------------- Meteor

struct MeteorParams {
  /// F_mean = P R / (alpha P + (1 - alpha) R); 0.9 gives 10PR/(R+9P).
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
  bool stem_stage = true;
  /// Optional; not owned.
  const text::SynonymTable* synonyms = nullptr;

  /// Throws InputError unless gamma in [0,1], beta > 0, alpha in [0,1].
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

enum class MatchStage : std::uint8_t { kExact, kStem, kSynonym };

struct MeteorMatch {
  std::size_t hyp;
  std::size_t ref;
  MatchStage stage;
};

struct MeteorAlignment {
  /// Sorted by hypothesis position.
  std::vector<MeteorMatch> matches;
  std::size_t chunks = 0;
};

/// Stage-wise greedy alignment. Within a stage hypothesis tokens are visited
/// left to right; each takes the reference position right after its left
/// neighbour's match when that position is free and compatible, otherwise the
/// leftmost free compatible position.
MeteorAlignment meteor_align(TokenSpan hyp, TokenSpan ref, const MeteorParams& params);

/// Number of maximal runs of matches adjacent in both sequences.
std::size_t count_chunks(std::span<const MeteorMatch> sorted_matches);

/// 100 * F_mean * (1 - gamma (chunks/m)^beta); 0 when nothing matches.
MetricScore meteor(TokenSpan hyp, TokenSpan ref, const MeteorParams& params = {});

// ---------------------------------------------------------------- NIST

/// exp(beta log^2(min(ratio, 1))) with beta set so the factor is 0.5 at 2/3.
double nist_brevity_factor(double ratio);

class NistScorer {
 public:
  struct Stats {
    std::vector<double> info_sum;            // per order, matched information
    std::vector<std::size_t> hyp_ngrams;     // per order
    std::size_t hyp_length = 0;
    std::size_t ref_length = 0;

    Stats& operator+=(const Stats& other);
  };

  /// Builds the information table over the reference corpus. Throws
  /// InputError when the references contain no tokens.
  explicit NistScorer(std::span<const Tokens> references, std::size_t max_n = 5);

  std::size_t max_n() const { return max_n_; }

  /// log2(count(prefix) / count(ngram)); the unigram prefix count is the
  /// number of reference tokens. Unseen n-grams weigh 0.
  double info(TokenSpan ngram) const;

  Stats stats(TokenSpan hyp, TokenSpan ref) const;
  double score(const Stats& stats) const;

  MetricScore sentence(TokenSpan hyp, TokenSpan ref) const;
  /// hyps[i] is scored against the i-th reference given at construction.
  MetricScore corpus(std::span<const Tokens> hyps) const;

 private:
  std::size_t max_n_;
  std::size_t total_words_ = 0;
  std::map<text::NgramMultiset::Ngram, std::size_t> counts_;
  std::vector<Tokens> references_;
};

// ---------------------------------------------------------------- SARI

struct SariBreakdown {
  double keep_f1 = 0.0;
  double delete_precision = 0.0;
  double add_f1 = 0.0;
  double score = 0.0;  // fraction
};

/// Averages, over orders 1..max_n, the mean of keep F1, delete precision and
/// add F1. A 0/0 ratio is 1 when both the performed and the expected
/// operation sets are empty, else 0.
SariBreakdown sari_breakdown(TokenSpan source, TokenSpan hyp, std::span<const Tokens> refs,
                             std::size_t max_n = 4);

MetricScore sari(TokenSpan source, TokenSpan hyp, std::span<const Tokens> refs,
                 std::size_t max_n = 4);

// ---------------------------------------------------------------- corpus

struct GenerationPair {
  std::string id;
  std::string source;
  std::string hypothesis;
  std::string reference;
};

struct EvalParams {
  Smoothing sentence_smoothing = Smoothing::kEpsilon;
  double epsilon = 1e-9;
  MeteorParams meteor;
  std::size_t nist_max_n = 5;
  std::size_t sari_max_n = 4;
  /// Worker threads for per-pair scoring; results never depend on it.
  unsigned jobs = 1;

  nlohmann::ordered_json to_json() const;
};

/// Sentence scores for every pair and corpus aggregates: BLEU and NIST use
/// their corpus formulations (BLEU unsmoothed), everything else the mean of
/// the per-pair values. Throws InputError on duplicate ids, an empty pair
/// list, or a non-lexical metric.
MetricReport evaluate_corpus(std::span<const GenerationPair> pairs,
                             const text::TokenizerConfig& tokenizer,
                             std::span<const Metric> metric_set, const EvalParams& params = {});

}  // namespace coe::metrics
