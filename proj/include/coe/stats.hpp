#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coe/metric.hpp"

namespace coe::stats {

enum class HumanDimension { kInformativeness, kClarity };

inline constexpr std::array<HumanDimension, 2> kDimensions = {HumanDimension::kInformativeness,
                                                              HumanDimension::kClarity};

std::string_view dimension_name(HumanDimension d);

/// One rater's 7-point judgement of one explanation.
struct AnnotationRecord {
  std::string sample_id;
  std::string rater_id;
  int informativeness = 0;
  int clarity = 0;

  int score(HumanDimension d) const {
    return d == HumanDimension::kInformativeness ? informativeness : clarity;
  }
};

/// CSV with header "sample_id,rater_id,informativeness,clarity". Throws
/// InputError on a bad header, a score outside 1..7, or a repeated
/// (sample_id, rater_id).
std::vector<AnnotationRecord> parse_annotations(std::string_view csv_content);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

// ---------------------------------------------------------------- consensus

struct ConsensusSample {
  std::string sample_id;
  double median_informativeness = 0.0;
  double median_clarity = 0.0;
  int n_raters = 0;
  bool retained = true;

  double median(HumanDimension d) const {
    return d == HumanDimension::kInformativeness ? median_informativeness : median_clarity;
  }
};

struct DroppedSample {
  std::string sample_id;
  int n_raters = 0;
};

struct ConsensusResult {
  /// Sorted by sample_id.
  std::vector<ConsensusSample> samples;
  /// Samples with fewer than min_raters annotations.
  std::vector<DroppedSample> dropped;

  std::size_t retained_count() const;
};

/// Median of the values; an even count gives the midpoint of the two central
/// values. Throws InputError when empty.
double median(std::vector<double> values);

/// retained = false when max - min of either dimension exceeds
/// disagreement_threshold. Independent of annotation order.
ConsensusResult aggregate_consensus(std::span<const AnnotationRecord> annotations, int min_raters,
                                    int disagreement_threshold);

// ---------------------------------------------------------------- agreement

enum class AlphaLevel { kNominal, kOrdinal, kInterval };

std::string_view level_name(AlphaLevel l);
std::optional<AlphaLevel> parse_level(std::string_view name);

/// units[u][r]: rating of unit u by rater r, empty when missing.
using RatingMatrix = std::vector<std::vector<std::optional<double>>>;

/// Builds the unit-by-rater matrix for one dimension. Units and raters are
/// ordered by id. When `samples` is given only those sample ids are used.
RatingMatrix rating_matrix(std::span<const AnnotationRecord> annotations, HumanDimension d,
                           const std::vector<std::string>* samples = nullptr);

/// Krippendorff's alpha from the coincidence matrix. Units with fewer than two
/// ratings are not pairable and are ignored. Returns 1 when the observed
/// disagreement is zero. Throws ComputeError when fewer than two units are
/// pairable.
double krippendorff_alpha(const RatingMatrix& units, AlphaLevel level);

// ---------------------------------------------------------------- intervals

struct MeanCi {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// mean -/+ t_{n-1, 1-(1-confidence)/2} * s / sqrt(n), sample standard
/// deviation. Throws InputError when fewer than two values.
MeanCi mean_ci(std::span<const double> values, double confidence = 0.95);

/// "5.20 (95% CI: 4.95X5.45)" where X is U+2014.
std::string format_mean_ci(const MeanCi& ci, double confidence = 0.95);

// ---------------------------------------------------------------- correlation

/// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

struct SpearmanResult {
  /// Empty when either rank vector has zero variance.
  std::optional<double> rho;
  std::optional<double> p_value;
  std::size_t n = 0;

  bool defined() const { return rho.has_value(); }
};

/// Pearson correlation of the average ranks, two-sided p-value from
/// t = rho sqrt((n-2)/(1-rho^2)) with n-2 degrees of freedom (0 when
/// |rho| = 1). Throws InputError on length mismatch or n < 3.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

/// Exact two-sided permutation p-value: share of the n! orderings of y whose
/// |rho| reaches the observed one. n must be in 3..10.
double spearman_exact_p(std::span<const double> x, std::span<const double> y);

struct CorrelationCell {
  std::optional<double> rho;
  std::optional<double> p_value;
  bool significant = false;
  std::size_t n = 0;
};

struct CorrelationRow {
  Metric metric;
  std::array<CorrelationCell, 2> cells;  // informativeness, clarity
};

struct CorrelationTable {
  std::vector<CorrelationRow> rows;
  double significance = 0.05;
};

using PerSampleScores = std::map<std::string, ScoreRow>;

/// Spearman between each metric and each median human score over retained
/// samples; significant when p < significance. Throws InputError when a
/// retained sample has no score for a requested metric.
CorrelationTable correlate_metrics(std::span<const ConsensusSample> consensus,
                                   const PerSampleScores& scores,
                                   std::span<const Metric> metric_set, double significance = 0.05);

}  // namespace coe::stats
