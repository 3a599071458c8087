#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "coe/corpus.hpp"

namespace coe::prompt {

enum class SegmentRole {
  kStartToken,
  kHeuristicText,
  kGivenText,
  kSeparator,
  kHateDemonstration,
  kTargetDemonstration,
  kHeuristicNle,
  kNleText,
  kEndToken,
};

enum class PromptVariant {
  kBaseline,
  kCoEFull,
  kCoENoHeuristic,
  kCoENoHateLabel,
  kCoENoTarget,
};

inline constexpr std::array<PromptVariant, 5> kAllVariants = {
    PromptVariant::kBaseline, PromptVariant::kCoEFull, PromptVariant::kCoENoHeuristic,
    PromptVariant::kCoENoHateLabel, PromptVariant::kCoENoTarget};

/// The chain-of-explanation prompt and its three single-feature ablations.
inline constexpr std::array<PromptVariant, 4> kAblationVariants = {
    PromptVariant::kCoEFull, PromptVariant::kCoENoHeuristic, PromptVariant::kCoENoHateLabel,
    PromptVariant::kCoENoTarget};

// Segment literals. One space after each colon, none before a separator.
inline constexpr std::string_view kHeuristicTextLiteral = "Given Text: ";
inline constexpr std::string_view kHateQuestionLiteral = "Is the text hateful? ";
inline constexpr std::string_view kTargetLeadLiteral = "The target group is: ";
inline constexpr std::string_view kHeuristicNleLiteral = "It is hateful because: ";

/// "baseline", "coe-full", "coe-no-heuristic", "coe-no-hate-label", "coe-no-target".
std::string_view variant_name(PromptVariant v);
std::optional<PromptVariant> parse_variant(std::string_view name);
std::string_view role_name(SegmentRole r);

struct SpecialTokens {
  std::string start = "<|startoftext|>";
  std::string separator = "<|sep|>";
  std::string end = "<|endoftext|>";

  /// Throws InputError unless all three are nonempty and none is a substring
  /// of another.
  void validate() const;

  /// "start=..,sep=..,end=.."; omitted keys keep their defaults. Commas inside
  /// a value are kept when not followed by a known key.
  static SpecialTokens parse(std::string_view spec);
  nlohmann::ordered_json to_json() const;

  friend bool operator==(const SpecialTokens&, const SpecialTokens&) = default;
};

struct PromptOptions {
  /// Answer rendered after "Is the text hateful? ".
  std::string hate_answer = "Yes";
  /// Baseline only: the completion is "target <sep> nle" instead of "nle".
  bool baseline_joint_target = false;

  nlohmann::ordered_json to_json() const;
};

struct Segment {
  SegmentRole role;
  std::string text;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct PromptSequence {
  std::vector<Segment> segments;
  PromptVariant variant = PromptVariant::kCoEFull;
  std::string record_id;

  std::string render() const;
};

/// True when the variant renders the target group.
bool requires_target(PromptVariant v, const PromptOptions& options = {});

/// Collapses whitespace runs to one space and trims, then escapes every
/// occurrence of a token literal by swapping its first character for a
/// look-alike (fullwidth form for ASCII, otherwise a trailing word joiner;
/// a single non-ASCII character becomes U+FFFD).
std::string sanitize_field(std::string_view field, const SpecialTokens& tokens);

/// sanitize_field plus an escaped colon in any "It is hateful because:"
/// marker, so the explanation cannot be mistaken for the marker.
std::string sanitize_nle(std::string_view nle, const SpecialTokens& tokens);

/// Throws InputError when the variant needs a target the record lacks, or the
/// tokens are invalid.
PromptSequence build_training_prompt(const corpus::HateRecord& record, PromptVariant variant,
                                     const SpecialTokens& tokens,
                                     const PromptOptions& options = {});

/// Every segment before the explanation text. prefix + nle + end token
/// renders to exactly the training prompt.
PromptSequence build_inference_prefix(const corpus::HateRecord& record, PromptVariant variant,
                                      const SpecialTokens& tokens,
                                      const PromptOptions& options = {});

struct ParseResult {
  std::optional<std::string> nle;
  /// Raw model output, kept for failures.
  std::string raw;

  bool ok() const { return nle.has_value(); }
};

/// Text after the last "It is hateful because:" marker (after the last
/// separator for variants without that marker), cut at the first end token,
/// whitespace-trimmed. A missing marker yields a failed result.
ParseResult parse_generated(std::string_view model_output, PromptVariant variant,
                            const SpecialTokens& tokens);

enum class PromptMode { kTraining, kInference };

std::string_view mode_name(PromptMode m);

struct EmitIssue {
  std::string record_id;
  std::string reason;
};

struct EmitResult {
  std::string content;
  std::size_t written = 0;
  std::vector<EmitIssue> skipped;
};

/// Header line {"variant","tokens","mode"} followed by one
/// {"id","prompt","completion"} line per valid record, in input order.
/// Training mode puts nle + end token in "completion"; inference leaves it "".
EmitResult render_prompt_file(std::span<const corpus::HateRecord> records, PromptVariant variant,
                              const SpecialTokens& tokens, PromptMode mode,
                              const PromptOptions& options = {});

/// render_prompt_file written to path; returns the count of lines written
/// (excluding the header) and the skipped records.
EmitResult emit_prompt_file(std::span<const corpus::HateRecord> records, PromptVariant variant,
                            const SpecialTokens& tokens, PromptMode mode,
                            const std::filesystem::path& path, const PromptOptions& options = {});

}  // namespace coe::prompt
