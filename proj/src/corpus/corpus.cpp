#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

#include "coe/corpus.hpp"
#include "coe/error.hpp"
#include "coe/io.hpp"

namespace coe::corpus {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

/// Record-level failure; caught per line and turned into a Rejection.
struct Reject {
  std::string reason;
};

std::string required_string(const json& obj, const std::string& key, std::string_view canonical) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Reject{fmt::format("missing field: {}", canonical)};
  if (!it->is_string()) throw Reject{fmt::format("invalid field type: {}", canonical)};
  std::string value = it->get<std::string>();
  if (trim(value).empty()) throw Reject{fmt::format("empty field: {}", canonical)};
  return value;
}

std::string read_id(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Reject{"missing field: id"};
  std::string id;
  if (it->is_string()) {
    id = it->get<std::string>();
  } else if (it->is_number_integer() || it->is_number_unsigned()) {
    id = it->dump();
  } else {
    throw Reject{"invalid field type: id"};
  }
  if (trim(id).empty()) throw Reject{"empty field: id"};
  return id;
}

bool read_hate_label(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return true;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_string()) {
    const auto& s = it->get_ref<const std::string&>();
    return s != "not_hate" && s != "false" && s != "0";
  }
  throw Reject{"invalid field type: hate_label"};
}

HateRecord parse_record(std::string_view line, const SchemaMap& schema) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error&) {
    throw Reject{"malformed JSON"};
  }
  if (!obj.is_object()) throw Reject{"line is not a JSON object"};

  HateRecord rec;
  rec.id = read_id(obj, schema.id);
  rec.text = required_string(obj, schema.text, "text");
  rec.implied_statement = required_string(obj, schema.implied_statement, "implied_statement");
  rec.hate_label = read_hate_label(obj, schema.hate_label);

  if (auto flag = obj.find(schema.target_unknown); flag != obj.end()) {
    if (!flag->is_boolean()) throw Reject{"invalid field type: target_unknown"};
    rec.target_unknown = flag->get<bool>();
  }
  auto target = obj.find(schema.target_group);
  if (target == obj.end()) {
    if (!rec.target_unknown) throw Reject{"missing field: target_group"};
  } else if (target->is_null()) {
    rec.target_unknown = true;
  } else if (target->is_string()) {
    rec.target_group = target->get<std::string>();
    if (trim(rec.target_group).empty()) {
      if (!rec.target_unknown) throw Reject{"empty field: target_group"};
      rec.target_group.clear();
    }
  } else {
    throw Reject{"invalid field type: target_group"};
  }

  if (auto cat = obj.find(schema.category); cat != obj.end() && cat->is_string()) {
    rec.category = cat->get<std::string>();
  }
  return rec;
}

}  // namespace

SchemaMap SchemaMap::parse(std::string_view overrides) {
  SchemaMap map;
  std::size_t start = 0;
  while (start < overrides.size()) {
    std::size_t end = overrides.find(',', start);
    if (end == std::string_view::npos) end = overrides.size();
    std::string_view item = trim(overrides.substr(start, end - start));
    start = end + 1;
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("schema override '{}' is not canonical=source", item));
    }
    std::string_view canonical = trim(item.substr(0, eq));
    std::string source(trim(item.substr(eq + 1)));
    if (source.empty()) throw InputError(fmt::format("schema override '{}' has no source", item));
    if (canonical == "id") map.id = source;
    else if (canonical == "text") map.text = source;
    else if (canonical == "hate_label") map.hate_label = source;
    else if (canonical == "target_group") map.target_group = source;
    else if (canonical == "implied_statement") map.implied_statement = source;
    else if (canonical == "target_unknown") map.target_unknown = source;
    else if (canonical == "category") map.category = source;
    else throw InputError(fmt::format("unknown canonical field '{}'", canonical));
  }
  return map;
}

nlohmann::json SchemaMap::to_json() const {
  return {{"id", id},
          {"text", text},
          {"hate_label", hate_label},
          {"target_group", target_group},
          {"implied_statement", implied_statement},
          {"target_unknown", target_unknown},
          {"category", category}};
}

LoadResult parse_corpus(std::string_view content, const SchemaMap& schema) {
  LoadResult result;
  std::unordered_set<std::string> seen;
  const auto lines = io::split_lines(content);
  result.line_count = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) {
      result.rejections.push_back({line_no, "blank line"});
      continue;
    }
    try {
      HateRecord rec = parse_record(lines[i], schema);
      if (!seen.insert(rec.id).second) throw Reject{fmt::format("duplicate id: {}", rec.id)};
      result.records.push_back(std::move(rec));
    } catch (const Reject& r) {
      result.rejections.push_back({line_no, r.reason});
    }
  }
  return result;
}

LoadResult load_corpus(const std::filesystem::path& path, const SchemaMap& schema) {
  return parse_corpus(io::read_file(path), schema);
}

std::string rejections_to_jsonl(std::span<const Rejection> rejections) {
  std::string out;
  for (const Rejection& r : rejections) {
    out += json{{"line", r.line}, {"reason", r.reason}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace coe::corpus
