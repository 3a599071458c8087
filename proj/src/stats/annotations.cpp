#include <charconv>
#include <set>

#include <fmt/format.h>

#include "coe/csv.hpp"
#include "coe/error.hpp"
#include "coe/io.hpp"
#include "coe/stats.hpp"

namespace coe::stats {
namespace {

int parse_score(const std::string& field, std::size_t line, std::string_view column) {
  int value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InputError(fmt::format("annotations line {}: {} '{}' is not an integer", line, column, field));
  }
  if (value < 1 || value > 7) {
    throw InputError(fmt::format("annotations line {}: {} {} outside 1..7", line, column, value));
  }
  return value;
}

}  // namespace

std::string_view dimension_name(HumanDimension d) {
  return d == HumanDimension::kInformativeness ? "Informativeness" : "Clarity";
}

std::vector<AnnotationRecord> parse_annotations(std::string_view csv_content) {
  const auto rows = csv::parse(csv_content);
  if (rows.empty()) throw InputError("annotations: missing header");
  const csv::Row expected = {"sample_id", "rater_id", "informativeness", "clarity"};
  if (rows.front() != expected) {
    throw InputError("annotations: header must be sample_id,rater_id,informativeness,clarity");
  }
  std::vector<AnnotationRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t line = i + 1;
    if (row.size() == 1 && row.front().empty()) continue;
    if (row.size() != 4) {
      throw InputError(fmt::format("annotations line {}: expected 4 fields, got {}", line, row.size()));
    }
    if (row[0].empty() || row[1].empty()) {
      throw InputError(fmt::format("annotations line {}: empty sample_id or rater_id", line));
    }
    AnnotationRecord rec{row[0], row[1], parse_score(row[2], line, "informativeness"),
                         parse_score(row[3], line, "clarity")};
    if (!seen.emplace(rec.sample_id, rec.rater_id).second) {
      throw InputError(fmt::format("annotations line {}: rater '{}' already rated sample '{}'", line,
                                   rec.rater_id, rec.sample_id));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  return parse_annotations(io::read_file(path));
}

}  // namespace coe::stats
