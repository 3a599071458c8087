#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace coe {

/// Report columns in the order they appear in result tables.
enum class Metric : std::uint8_t {
  kBleu1,
  kBleu2,
  kMeteor,
  kNist,
  kRouge1,
  kRouge2,
  kRougeL,
  kSari,
  kBertScore,
  kBleurt,
  kNubia,
};

inline constexpr std::size_t kMetricCount = 11;

inline constexpr std::array<Metric, 8> kLexicalMetrics = {
    Metric::kBleu1,  Metric::kBleu2,  Metric::kMeteor, Metric::kNist,
    Metric::kRouge1, Metric::kRouge2, Metric::kRougeL, Metric::kSari};

inline constexpr std::array<Metric, 3> kExternalMetrics = {Metric::kBertScore, Metric::kBleurt,
                                                           Metric::kNubia};

inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::kBleu1, Metric::kBleu2,  Metric::kMeteor, Metric::kNist,
    Metric::kRouge1, Metric::kRouge2, Metric::kRougeL, Metric::kSari,
    Metric::kBertScore, Metric::kBleurt, Metric::kNubia};

constexpr std::size_t index_of(Metric m) { return static_cast<std::size_t>(m); }

/// Column code: B1, B2, M, NI, R1, R2, R-L, S, BS, BL, NU.
std::string_view metric_code(Metric m);

/// Row label used in correlation tables, e.g. "BLEU-1 (B1)".
std::string_view metric_long_name(Metric m);

bool is_external(Metric m);

std::optional<Metric> parse_metric(std::string_view code);

/// Parses a comma-separated code list. "all" expands to the eight lexical
/// metrics. Throws InputError on unknown codes or duplicates.
std::vector<Metric> parse_metric_list(std::string_view list);

}  // namespace coe

namespace coe {

/// One row of a score table; absent cells stay empty and render as "-".
struct ScoreRow {
  std::string id;
  std::array<std::optional<double>, kMetricCount> values{};

  std::optional<double>& operator[](Metric m) { return values[index_of(m)]; }
  const std::optional<double>& operator[](Metric m) const { return values[index_of(m)]; }
};

/// Per-pair and corpus-level scores plus the provenance needed to reproduce
/// them. Lexical columns come from evaluate_corpus; BS/BL/NU are merged in
/// from an external producer.
struct MetricReport {
  /// Columns present in this report, in table order.
  std::vector<Metric> metrics;
  std::vector<ScoreRow> rows;
  ScoreRow aggregate{"corpus", {}};
  /// Corpus NIST times ten, the convenience scaling reported next to raw NIST.
  std::optional<double> nist_scaled;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
  /// Human-readable notes, e.g. missing external cells.
  std::vector<std::string> flags;
};

}  // namespace coe
