#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/io.hpp"
#include "coe/reporting.hpp"

namespace coe::reporting {
namespace {

using nlohmann::json;

bool in_range(Metric m, double v) {
  if (m == Metric::kBertScore) return v >= -100.0 && v <= 100.0;
  return v >= 0.0 && v <= 100.0;
}

}  // namespace

ExternalScores parse_external_scores(std::string_view content,
                                     const std::set<std::string>& expected_ids) {
  ExternalScores out;
  const auto lines = io::split_lines(content);
  if (lines.empty()) throw InputError("external scores: missing header line");

  json header;
  try {
    header = json::parse(lines.front());
  } catch (const json::parse_error&) {
    throw InputError("external scores line 1: malformed header");
  }
  if (!header.is_object() || !header.contains("producer") || !header.contains("scaling") ||
      !header["producer"].is_string() || !header["scaling"].is_string()) {
    throw InputError("external scores line 1: header needs string fields producer and scaling");
  }
  out.producer = header["producer"].get<std::string>();
  out.scaling = header["scaling"].get<std::string>();

  std::set<std::pair<std::string, Metric>> seen;
  std::set<std::string> unknown;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::parse_error&) {
      throw InputError(fmt::format("external scores line {}: malformed JSON", line_no));
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("metric") ||
        !obj.contains("value") || !obj["id"].is_string() || !obj["metric"].is_string() ||
        !obj["value"].is_number()) {
      throw InputError(fmt::format("external scores line {}: expected id, metric, value", line_no));
    }
    ExternalScoreRecord rec;
    rec.id = obj["id"].get<std::string>();
    const auto metric = parse_metric(obj["metric"].get<std::string>());
    if (!metric || !is_external(*metric)) {
      throw InputError(fmt::format("external scores line {}: metric must be BS, BL or NU", line_no));
    }
    rec.metric = *metric;
    rec.value = obj["value"].get<double>();
    if (!in_range(rec.metric, rec.value)) {
      throw InputError(fmt::format("external scores line {}: {} value {} out of range", line_no,
                                   metric_code(rec.metric), rec.value));
    }
    if (!seen.emplace(rec.id, rec.metric).second) {
      throw InputError(fmt::format("external scores line {}: duplicate ({}, {})", line_no, rec.id,
                                   metric_code(rec.metric)));
    }
    if (expected_ids.count(rec.id) == 0) {
      unknown.insert(rec.id);
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  out.unknown_ids.assign(unknown.begin(), unknown.end());
  return out;
}

ExternalScores ingest_external_scores(const std::filesystem::path& path,
                                      const std::set<std::string>& expected_ids) {
  return parse_external_scores(io::read_file(path), expected_ids);
}

void merge_external(MetricReport& report, const ExternalScores& scores) {
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < report.rows.size(); ++i) row_of.emplace(report.rows[i].id, i);

  std::set<Metric> present;
  for (const auto& rec : scores.records) {
    auto it = row_of.find(rec.id);
    if (it == row_of.end()) continue;
    report.rows[it->second][rec.metric] = rec.value;
    present.insert(rec.metric);
  }

  for (Metric m : kExternalMetrics) {
    if (present.count(m) == 0) continue;
    if (std::find(report.metrics.begin(), report.metrics.end(), m) == report.metrics.end()) {
      report.metrics.push_back(m);
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (const ScoreRow& row : report.rows) {
      if (row[m]) {
        sum += *row[m];
        ++count;
      } else {
        report.flags.push_back(fmt::format("missing {} for '{}'", metric_code(m), row.id));
      }
    }
    report.aggregate[m] = count > 0 ? std::optional<double>(sum / static_cast<double>(count))
                                    : std::nullopt;
  }
  for (const auto& id : scores.unknown_ids) {
    report.flags.push_back(fmt::format("external scores for unknown id '{}' ignored", id));
  }

  std::sort(report.metrics.begin(), report.metrics.end(),
            [](Metric a, Metric b) { return index_of(a) < index_of(b); });
  report.provenance["external"] = {{"producer", scores.producer}, {"scaling", scores.scaling}};
}

}  // namespace coe::reporting
