#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/io.hpp"
#include "coe/prompt.hpp"

namespace coe::prompt {

std::string_view mode_name(PromptMode m) {
  return m == PromptMode::kTraining ? "training" : "inference";
}

EmitResult render_prompt_file(std::span<const corpus::HateRecord> records, PromptVariant variant,
                              const SpecialTokens& tokens, PromptMode mode,
                              const PromptOptions& options) {
  tokens.validate();
  EmitResult result;
  nlohmann::ordered_json header;
  header["variant"] = variant_name(variant);
  header["tokens"] = tokens.to_json();
  header["mode"] = mode_name(mode);
  header["options"] = options.to_json();
  result.content = header.dump() + '\n';

  for (const corpus::HateRecord& record : records) {
    if (requires_target(variant, options) && sanitize_field(record.target_group, tokens).empty()) {
      result.skipped.push_back(
          {record.id, fmt::format("missing target group for {}", variant_name(variant))});
      continue;
    }
    const std::string prompt = build_inference_prefix(record, variant, tokens, options).render();
    std::string completion;
    if (mode == PromptMode::kTraining) {
      const std::string full = build_training_prompt(record, variant, tokens, options).render();
      completion = full.substr(prompt.size());
    }
    nlohmann::ordered_json line;
    line["id"] = record.id;
    line["prompt"] = prompt;
    line["completion"] = completion;
    result.content += line.dump() + '\n';
    ++result.written;
  }
  return result;
}

EmitResult emit_prompt_file(std::span<const corpus::HateRecord> records, PromptVariant variant,
                            const SpecialTokens& tokens, PromptMode mode,
                            const std::filesystem::path& path, const PromptOptions& options) {
  EmitResult result = render_prompt_file(records, variant, tokens, mode, options);
  io::write_file(path, result.content);
  return result;
}

}  // namespace coe::prompt
