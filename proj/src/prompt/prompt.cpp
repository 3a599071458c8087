#include "coe/prompt.hpp"

#include <fmt/format.h>

#include "coe/error.hpp"

namespace coe::prompt {
namespace {

constexpr std::string_view kNleMarker = "It is hateful because:";
constexpr std::string_view kNleMarkerEscaped = "It is hateful because\xEF\xBC\x9A";  // U+FF1A
constexpr std::string_view kWordJoiner = "\xE2\x81\xA0";                               // U+2060
constexpr std::string_view kReplacement = "\xEF\xBF\xBD";                              // U+FFFD

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t first = 0;
  while (first < s.size() && is_ascii_space(s[first])) ++first;
  std::size_t last = s.size();
  while (last > first && is_ascii_space(s[last - 1])) --last;
  return std::string(s.substr(first, last - first));
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::string escape_literal(std::string_view literal) {
  auto lead = static_cast<unsigned char>(literal.front());
  if (lead >= 0x21 && lead <= 0x7E) {
    // Fullwidth forms U+FF01..U+FF5E mirror ASCII 0x21..0x7E.
    char32_t cp = 0xFF01 + (lead - 0x21);
    std::string out;
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
    out += literal.substr(1);
    return out;
  }
  std::size_t first = std::min(utf8_length(lead), literal.size());
  // A one-character literal survives any insertion, so it is replaced.
  if (first == literal.size()) return std::string(kReplacement);
  return std::string(literal.substr(0, first)) + std::string(kWordJoiner) +
         std::string(literal.substr(first));
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

struct Texts {
  std::string text;
  std::string target;
  std::string nle;
};

Texts prepare(const corpus::HateRecord& record, PromptVariant variant, const SpecialTokens& tokens,
              const PromptOptions& options) {
  tokens.validate();
  Texts t;
  t.text = sanitize_field(record.text, tokens);
  t.target = sanitize_field(record.target_group, tokens);
  t.nle = sanitize_nle(record.implied_statement, tokens);
  if (requires_target(variant, options) && t.target.empty()) {
    throw InputError(fmt::format("record '{}' has no target group, required by variant {}",
                                 record.id, variant_name(variant)));
  }
  return t;
}

std::vector<Segment> full_segments(const Texts& t, PromptVariant variant,
                                   const SpecialTokens& tokens, const PromptOptions& options) {
  std::vector<Segment> s;
  s.push_back({SegmentRole::kStartToken, tokens.start});
  if (variant == PromptVariant::kBaseline) {
    s.push_back({SegmentRole::kGivenText, t.text});
    s.push_back({SegmentRole::kSeparator, tokens.separator});
    if (options.baseline_joint_target) {
      s.push_back({SegmentRole::kTargetDemonstration, t.target});
      s.push_back({SegmentRole::kSeparator, tokens.separator});
    }
    s.push_back({SegmentRole::kNleText, t.nle});
    s.push_back({SegmentRole::kEndToken, tokens.end});
    return s;
  }

  const bool heuristics = variant != PromptVariant::kCoENoHeuristic;
  if (heuristics) s.push_back({SegmentRole::kHeuristicText, std::string(kHeuristicTextLiteral)});
  s.push_back({SegmentRole::kGivenText, t.text});
  s.push_back({SegmentRole::kSeparator, tokens.separator});
  if (variant != PromptVariant::kCoENoHateLabel) {
    s.push_back({SegmentRole::kHateDemonstration,
                 std::string(kHateQuestionLiteral) + options.hate_answer});
    s.push_back({SegmentRole::kSeparator, tokens.separator});
  }
  if (variant != PromptVariant::kCoENoTarget) {
    s.push_back({SegmentRole::kTargetDemonstration, std::string(kTargetLeadLiteral) + t.target});
    s.push_back({SegmentRole::kSeparator, tokens.separator});
  }
  if (heuristics) s.push_back({SegmentRole::kHeuristicNle, std::string(kHeuristicNleLiteral)});
  s.push_back({SegmentRole::kNleText, t.nle});
  s.push_back({SegmentRole::kEndToken, tokens.end});
  return s;
}

bool has_nle_marker(PromptVariant v) {
  return v != PromptVariant::kBaseline && v != PromptVariant::kCoENoHeuristic;
}

}  // namespace

std::string_view variant_name(PromptVariant v) {
  switch (v) {
    case PromptVariant::kBaseline: return "baseline";
    case PromptVariant::kCoEFull: return "coe-full";
    case PromptVariant::kCoENoHeuristic: return "coe-no-heuristic";
    case PromptVariant::kCoENoHateLabel: return "coe-no-hate-label";
    case PromptVariant::kCoENoTarget: return "coe-no-target";
  }
  return "unknown";
}

std::optional<PromptVariant> parse_variant(std::string_view name) {
  for (PromptVariant v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view role_name(SegmentRole r) {
  switch (r) {
    case SegmentRole::kStartToken: return "StartToken";
    case SegmentRole::kHeuristicText: return "HeuristicText";
    case SegmentRole::kGivenText: return "GivenText";
    case SegmentRole::kSeparator: return "Separator";
    case SegmentRole::kHateDemonstration: return "HateDemonstration";
    case SegmentRole::kTargetDemonstration: return "TargetDemonstration";
    case SegmentRole::kHeuristicNle: return "HeuristicNle";
    case SegmentRole::kNleText: return "NleText";
    case SegmentRole::kEndToken: return "EndToken";
  }
  return "Unknown";
}

void SpecialTokens::validate() const {
  const std::array<const std::string*, 3> all = {&start, &separator, &end};
  for (const auto* t : all) {
    if (t->empty()) throw InputError("special tokens must be nonempty");
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (i != j && all[j]->find(*all[i]) != std::string::npos) {
        throw InputError(fmt::format("special token '{}' occurs inside '{}'", *all[i], *all[j]));
      }
    }
  }
}

SpecialTokens SpecialTokens::parse(std::string_view spec) {
  SpecialTokens tokens;
  std::string* current = nullptr;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    std::string_view item = spec.substr(start, end - start);
    start = end + 1;
    std::string* target = nullptr;
    std::string_view value;
    for (auto [key, slot] : {std::pair<std::string_view, std::string*>{"start=", &tokens.start},
                             {"sep=", &tokens.separator},
                             {"end=", &tokens.end}}) {
      if (item.substr(0, key.size()) == key) {
        target = slot;
        value = item.substr(key.size());
      }
    }
    if (target != nullptr) {
      *target = std::string(value);
      current = target;
    } else if (current != nullptr) {
      *current += ',';
      *current += item;
    } else if (!item.empty()) {
      throw InputError(fmt::format("cannot parse token spec '{}'", spec));
    }
  }
  tokens.validate();
  return tokens;
}

nlohmann::ordered_json SpecialTokens::to_json() const {
  return {{"start", start}, {"sep", separator}, {"end", end}};
}

nlohmann::ordered_json PromptOptions::to_json() const {
  return {{"hate_answer", hate_answer}, {"baseline_joint_target", baseline_joint_target}};
}

std::string PromptSequence::render() const {
  std::string out;
  for (const Segment& s : segments) out += s.text;
  return out;
}

bool requires_target(PromptVariant v, const PromptOptions& options) {
  switch (v) {
    case PromptVariant::kBaseline: return options.baseline_joint_target;
    case PromptVariant::kCoENoTarget: return false;
    default: return true;
  }
}

std::string sanitize_field(std::string_view field, const SpecialTokens& tokens) {
  std::string out = trim(collapse_whitespace(field));
  // Escaping one literal can expose another only through contrived token
  // choices; repeat until stable.
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    for (const std::string* literal : {&tokens.start, &tokens.separator, &tokens.end}) {
      if (literal->empty() || out.find(*literal) == std::string::npos) continue;
      out = replace_all(std::move(out), *literal, escape_literal(*literal));
      changed = true;
    }
    if (!changed) break;
  }
  return out;
}

std::string sanitize_nle(std::string_view nle, const SpecialTokens& tokens) {
  return replace_all(sanitize_field(nle, tokens), kNleMarker, kNleMarkerEscaped);
}

PromptSequence build_training_prompt(const corpus::HateRecord& record, PromptVariant variant,
                                     const SpecialTokens& tokens, const PromptOptions& options) {
  Texts t = prepare(record, variant, tokens, options);
  return PromptSequence{full_segments(t, variant, tokens, options), variant, record.id};
}

PromptSequence build_inference_prefix(const corpus::HateRecord& record, PromptVariant variant,
                                      const SpecialTokens& tokens, const PromptOptions& options) {
  PromptSequence seq = build_training_prompt(record, variant, tokens, options);
  // Baseline joint mode generates the target too, so its prefix stops at the
  // first separator.
  std::size_t cut = seq.segments.size();
  for (std::size_t i = 0; i < seq.segments.size(); ++i) {
    const SegmentRole role = seq.segments[i].role;
    if (role == SegmentRole::kNleText ||
        (variant == PromptVariant::kBaseline && role == SegmentRole::kTargetDemonstration)) {
      cut = i;
      break;
    }
  }
  seq.segments.resize(cut);
  return seq;
}

ParseResult parse_generated(std::string_view model_output, PromptVariant variant,
                            const SpecialTokens& tokens) {
  ParseResult result;
  result.raw = std::string(model_output);
  const std::string_view marker = has_nle_marker(variant) ? kNleMarker : std::string_view(tokens.separator);
  const std::size_t at = model_output.rfind(marker);
  if (marker.empty() || at == std::string_view::npos) return result;

  std::string_view tail = model_output.substr(at + marker.size());
  if (std::size_t end = tail.find(tokens.end); !tokens.end.empty() && end != std::string_view::npos) {
    tail = tail.substr(0, end);
  }
  result.nle = trim(tail);
  return result;
}

}  // namespace coe::prompt
