#include <algorithm>
#include <charconv>
#include <string>

#include <fmt/format.h>

#include "coe/csv.hpp"
#include "coe/error.hpp"
#include "coe/reporting.hpp"

namespace coe::reporting {
namespace {

std::string md_line(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) {
    out += ' ';
    out += c;
    out += " |";
  }
  out += '\n';
  return out;
}

std::string md_rule(std::size_t numeric_columns) {
  std::string out = "|---|";
  for (std::size_t i = 0; i < numeric_columns; ++i) out += "---:|";
  out += '\n';
  return out;
}

std::string csv_cell(const std::optional<double>& v) { return v ? csv::format_full(*v) : ""; }

std::vector<std::string> csv_header(std::string_view first, std::span<const Metric> cols) {
  std::vector<std::string> h{std::string(first)};
  for (Metric m : cols) h.emplace_back(metric_code(m));
  return h;
}

std::vector<std::string> csv_fields(const ScoreRow& row, std::span<const Metric> cols) {
  std::vector<std::string> f{row.id};
  for (Metric m : cols) f.push_back(csv_cell(row[m]));
  return f;
}

std::string report_label(const MetricReport& report, Style style) {
  std::string label = "corpus";
  if (auto it = report.provenance.find("label");
      it != report.provenance.end() && it->is_string()) {
    label = it->get<std::string>();
  }
  if (style == Style::kTable3) {
    if (auto it = report.provenance.find("variant");
        it != report.provenance.end() && it->is_string()) {
      if (auto v = prompt::parse_variant(it->get<std::string>())) label = variant_row_label(*v, label);
    }
  }
  return label;
}

}  // namespace

std::optional<Format> parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "markdown" || name == "md") return Format::kMarkdown;
  return std::nullopt;
}

std::optional<Style> parse_style(std::string_view name) {
  if (name == "table2") return Style::kTable2;
  if (name == "table3") return Style::kTable3;
  if (name == "table4") return Style::kTable4;
  return std::nullopt;
}

std::string variant_row_label(prompt::PromptVariant variant, std::string_view full_label) {
  switch (variant) {
    case prompt::PromptVariant::kCoENoHeuristic: return "Heuristic*";
    case prompt::PromptVariant::kCoENoHateLabel: return "Hate Label*";
    case prompt::PromptVariant::kCoENoTarget: return "Target Group*";
    default: return std::string(full_label);
  }
}

std::string presentation_cell(const std::optional<double>& value, int decimals) {
  if (!value) return "-";
  return fmt::format("{:.{}f}", *value, decimals);
}

std::vector<Metric> csv_columns(const MetricReport& report) {
  std::vector<Metric> cols(kLexicalMetrics.begin(), kLexicalMetrics.end());
  const bool any_external = std::any_of(report.metrics.begin(), report.metrics.end(), is_external);
  if (any_external) cols.insert(cols.end(), kExternalMetrics.begin(), kExternalMetrics.end());
  return cols;
}

std::string render_pairs_csv(const MetricReport& report) {
  const auto cols = csv_columns(report);
  std::string out = csv::format_row(csv_header("id", cols));
  for (const auto& row : report.rows) out += csv::format_row(csv_fields(row, cols));
  return out;
}

std::string render_aggregate_csv(const MetricReport& report) {
  const auto cols = csv_columns(report);
  return csv::format_row(csv_header("id", cols)) + csv::format_row(csv_fields(report.aggregate, cols));
}

std::string render_report(const MetricReport& report, Format format, Style style) {
  if (style == Style::kTable4) {
    throw InputError("table4 renders correlation tables, not metric reports");
  }
  for (Metric m : report.metrics) {
    if (!report.aggregate[m]) {
      throw InputError(fmt::format("report is missing the aggregate for {}", metric_code(m)));
    }
  }
  if (format == Format::kCsv) {
    return render_pairs_csv(report) + csv::format_row(csv_fields(report.aggregate, csv_columns(report)));
  }
  SummaryRow row{report_label(report, style), report.aggregate};
  return render_summary(std::span<const SummaryRow>(&row, 1), format, style);
}

std::string render_summary(std::span<const SummaryRow> rows, Format format, Style style) {
  if (style == Style::kTable4) {
    throw InputError("table4 renders correlation tables, not score summaries");
  }
  if (format == Format::kCsv) {
    std::string out = csv::format_row(csv_header("label", kAllMetrics));
    for (const auto& r : rows) {
      ScoreRow labelled = r.scores;
      labelled.id = r.label;
      out += csv::format_row(csv_fields(labelled, kAllMetrics));
    }
    return out;
  }
  std::vector<std::string> header{"Models"};
  for (Metric m : kAllMetrics) header.emplace_back(metric_code(m));
  std::string out = md_line(header) + md_rule(kAllMetrics.size());
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.label};
    for (Metric m : kAllMetrics) cells.push_back(presentation_cell(r.scores[m], 1));
    out += md_line(cells);
  }
  return out;
}

std::string render_correlations(const stats::CorrelationTable& table, Format format) {
  if (format == Format::kCsv) {
    std::string out = csv::format_row(std::vector<std::string>{
        "metric", "informativeness_rho", "informativeness_p", "informativeness_significant",
        "clarity_rho", "clarity_p", "clarity_significant", "n"});
    for (const auto& row : table.rows) {
      std::vector<std::string> f{std::string(metric_code(row.metric))};
      for (const auto& cell : row.cells) {
        f.push_back(csv_cell(cell.rho));
        f.push_back(csv_cell(cell.p_value));
        f.emplace_back(cell.significant ? "true" : "false");
      }
      f.push_back(std::to_string(row.cells[0].n));
      out += csv::format_row(f);
    }
    return out;
  }
  std::string out = md_line({"Metrics", "Informativeness", "Clarity"}) + md_rule(2);
  for (const auto& row : table.rows) {
    std::vector<std::string> cells{std::string(metric_long_name(row.metric))};
    for (const auto& cell : row.cells) {
      if (!cell.rho) {
        cells.emplace_back("n/a");
        continue;
      }
      std::string c = fmt::format("{:.2f}", *cell.rho);
      if (cell.significant) c += '*';
      cells.push_back(std::move(c));
    }
    out += md_line(cells);
  }
  return out;
}

nlohmann::ordered_json report_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["provenance"] = report.provenance;
  nlohmann::ordered_json agg = nlohmann::ordered_json::object();
  for (Metric m : report.metrics) {
    const auto& v = report.aggregate[m];
    agg[std::string(metric_code(m))] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
  }
  j["aggregate"] = agg;
  j["nist_scaled"] = report.nist_scaled ? nlohmann::ordered_json(*report.nist_scaled)
                                        : nlohmann::ordered_json();
  j["pairs"] = report.rows.size();
  j["flags"] = report.flags;
  return j;
}

namespace {

std::optional<double> parse_cell(const std::string& cell, std::size_t row) {
  if (cell.empty() || cell == "-") return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw InputError(fmt::format("row {}: bad number '{}'", row, cell));
  }
  return v;
}

}  // namespace

stats::CorrelationTable parse_correlations_csv(std::string_view content) {
  const auto table = csv::parse(content);
  if (table.empty() || table.front().size() != 8 || table.front()[0] != "metric") {
    throw InputError("correlation table: unexpected header");
  }
  stats::CorrelationTable out;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& f = table[r];
    if (f.size() != 8) throw InputError(fmt::format("correlation table row {}: expected 8 fields", r + 1));
    auto metric = parse_metric(f[0]);
    if (!metric) throw InputError(fmt::format("correlation table row {}: unknown metric '{}'", r + 1, f[0]));
    stats::CorrelationRow row{*metric, {}};
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(f[7].data(), f[7].data() + f[7].size(), n);
    if (ec != std::errc() || ptr != f[7].data() + f[7].size()) {
      throw InputError(fmt::format("correlation table row {}: bad count '{}'", r + 1, f[7]));
    }
    for (std::size_t d = 0; d < 2; ++d) {
      auto& cell = row.cells[d];
      cell.rho = parse_cell(f[1 + 3 * d], r + 1);
      cell.p_value = parse_cell(f[2 + 3 * d], r + 1);
      cell.significant = f[3 + 3 * d] == "true";
      cell.n = n;
    }
    out.rows.push_back(row);
  }
  return out;
}

std::vector<ScoreRow> parse_score_csv(std::string_view content) {
  const auto table = csv::parse(content);
  if (table.empty()) throw InputError("score table: empty input");
  const auto& header = table.front();
  if (header.empty()) throw InputError("score table: empty header");
  std::vector<Metric> cols;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto m = parse_metric(header[i]);
    if (!m) throw InputError(fmt::format("score table: unknown column '{}'", header[i]));
    cols.push_back(*m);
  }
  std::vector<ScoreRow> rows;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& fields = table[r];
    if (fields.size() != header.size()) {
      throw InputError(fmt::format("score table row {}: expected {} fields, got {}", r + 1,
                                   header.size(), fields.size()));
    }
    ScoreRow row;
    row.id = fields[0];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      row[cols[c]] = parse_cell(fields[c + 1], r + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace coe::reporting
