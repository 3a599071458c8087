#include "coe/metric.hpp"

#include <algorithm>
#include <string>

#include <fmt/format.h>

#include "coe/error.hpp"

namespace coe {
namespace {

struct MetricNames {
  std::string_view code;
  std::string_view long_name;
};

constexpr std::array<MetricNames, kMetricCount> kNames = {{
    {"B1", "BLEU-1 (B1)"},
    {"B2", "BLEU-2 (B2)"},
    {"M", "Meteor (M)"},
    {"NI", "NIST (NI)"},
    {"R1", "Rouge-1 (R1)"},
    {"R2", "Rouge-2 (R2)"},
    {"R-L", "Rouge-L (R-L)"},
    {"S", "SARI (S)"},
    {"BS", "BERTScore (BS)"},
    {"BL", "BLEURT (BL)"},
    {"NU", "NUBIA (NU)"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view metric_code(Metric m) { return kNames[index_of(m)].code; }

std::string_view metric_long_name(Metric m) { return kNames[index_of(m)].long_name; }

bool is_external(Metric m) {
  return m == Metric::kBertScore || m == Metric::kBleurt || m == Metric::kNubia;
}

std::optional<Metric> parse_metric(std::string_view code) {
  for (Metric m : kAllMetrics) {
    if (metric_code(m) == code) return m;
  }
  return std::nullopt;
}

std::vector<Metric> parse_metric_list(std::string_view list) {
  std::vector<Metric> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    std::string_view item = trim(list.substr(start, end - start));
    start = end + 1;
    if (item.empty()) continue;
    if (item == "all") {
      for (Metric m : kLexicalMetrics) {
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
      }
      continue;
    }
    auto parsed = parse_metric(item);
    if (!parsed) throw InputError(fmt::format("unknown metric id '{}'", item));
    if (std::find(out.begin(), out.end(), *parsed) != out.end()) {
      throw InputError(fmt::format("metric '{}' listed twice", item));
    }
    out.push_back(*parsed);
  }
  if (out.empty()) throw InputError("empty metric list");
  return out;
}

}  // namespace coe
