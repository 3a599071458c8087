#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coe/metric.hpp"
#include "coe/prompt.hpp"
#include "coe/stats.hpp"

namespace coe::reporting {

struct ExternalScoreRecord {
  std::string id;
  Metric metric = Metric::kBertScore;
  double value = 0.0;
};

struct ExternalScores {
  std::string producer;
  std::string scaling;
  std::vector<ExternalScoreRecord> records;
  /// Ids present in the file but not in the expected set; their records are
  /// dropped.
  std::vector<std::string> unknown_ids;
};

/// JSON Lines: header {"producer","scaling"}, then {"id","metric","value"}
/// with metric one of BS, BL, NU. BS must lie in [-100, 100], BL and NU in
/// [0, 100]. Throws InputError on a malformed line, an out-of-range value or
/// a repeated (id, metric).
ExternalScores parse_external_scores(std::string_view content,
                                     const std::set<std::string>& expected_ids);
ExternalScores ingest_external_scores(const std::filesystem::path& path,
                                      const std::set<std::string>& expected_ids);

/// Adds the external columns to the report without reordering or dropping
/// rows. Missing cells stay empty and are listed in report.flags; the
/// aggregate of an external column is the mean of its present cells.
void merge_external(MetricReport& report, const ExternalScores& scores);

enum class Format { kCsv, kMarkdown };
enum class Style { kTable2, kTable3, kTable4 };

std::optional<Format> parse_format(std::string_view name);
std::optional<Style> parse_style(std::string_view name);

/// A labelled aggregate row for multi-system tables.
struct SummaryRow {
  std::string label;
  ScoreRow scores;
};

/// "Heuristic*", "Hate Label*", "Target Group*" for the ablations; the given
/// label for the full prompt and the baseline.
std::string variant_row_label(prompt::PromptVariant variant, std::string_view full_label);

/// One decimal, or "-" when absent.
std::string presentation_cell(const std::optional<double>& value, int decimals = 1);

/// CSV (table2/table3): header, one row per pair, then the aggregate row, all
/// at full precision. Markdown (table2/table3): one labelled aggregate row in
/// the B1,B2,M,NI,R1,R2,R-L,S,BS,BL,NU order, one decimal, "-" for absent
/// cells. The label is provenance["label"] when present, else "corpus"; with
/// table3 and provenance["variant"] set, ablation labels apply. Throws
/// InputError for table4, which renders correlation tables.
std::string render_report(const MetricReport& report, Format format, Style style);

/// Multi-row table2/table3 rendering of aggregate rows.
std::string render_summary(std::span<const SummaryRow> rows, Format format, Style style);

/// Table-4 layout: metric rows, Informativeness and Clarity columns, two
/// decimals with '*' when p < significance (markdown); full precision with
/// p-values (csv).
std::string render_correlations(const stats::CorrelationTable& table, Format format);

/// Reads the CSV written by render_correlations. Throws InputError on a
/// malformed table.
stats::CorrelationTable parse_correlations_csv(std::string_view content);

/// Per-pair CSV (header + rows) and aggregate CSV (header + one row).
std::string render_pairs_csv(const MetricReport& report);
std::string render_aggregate_csv(const MetricReport& report);

/// Columns written to CSV: the eight lexical ones, plus BS/BL/NU when the
/// report carries any external column.
std::vector<Metric> csv_columns(const MetricReport& report);

/// Provenance, aggregate (raw and x10 NIST) and flags as JSON.
nlohmann::ordered_json report_json(const MetricReport& report);

/// Reads a score CSV written by render_pairs_csv/render_aggregate_csv. "-"
/// and "" cells are absent. Throws InputError on unknown columns.
std::vector<ScoreRow> parse_score_csv(std::string_view content);

}  // namespace coe::reporting
