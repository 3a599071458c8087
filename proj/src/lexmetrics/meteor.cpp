#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/lexmetrics.hpp"

namespace coe::metrics {
namespace {

using Compatible = std::function<bool(std::size_t, std::size_t)>;

void run_stage(MatchStage stage, const Compatible& compatible, std::vector<int>& hyp_to_ref,
               std::vector<bool>& ref_used, std::vector<MeteorMatch>& matches) {
  const std::size_t ref_size = ref_used.size();
  for (std::size_t i = 0; i < hyp_to_ref.size(); ++i) {
    if (hyp_to_ref[i] >= 0) continue;
    std::optional<std::size_t> pick;
    if (i > 0 && hyp_to_ref[i - 1] >= 0) {
      const auto next = static_cast<std::size_t>(hyp_to_ref[i - 1]) + 1;
      if (next < ref_size && !ref_used[next] && compatible(i, next)) pick = next;
    }
    for (std::size_t j = 0; !pick && j < ref_size; ++j) {
      if (!ref_used[j] && compatible(i, j)) pick = j;
    }
    if (!pick) continue;
    hyp_to_ref[i] = static_cast<int>(*pick);
    ref_used[*pick] = true;
    matches.push_back({i, *pick, stage});
  }
}

}  // namespace

void MeteorParams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError(fmt::format("meteor gamma {} not in [0,1]", gamma));
  if (!(beta > 0.0)) throw InputError(fmt::format("meteor beta {} must be > 0", beta));
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError(fmt::format("meteor alpha {} not in [0,1]", alpha));
}

nlohmann::ordered_json MeteorParams::to_json() const {
  return {{"alpha", alpha},
          {"beta", beta},
          {"gamma", gamma},
          {"stem_stage", stem_stage},
          {"synonym_stage", synonyms != nullptr}};
}

std::size_t count_chunks(std::span<const MeteorMatch> sorted_matches) {
  if (sorted_matches.empty()) return 0;
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < sorted_matches.size(); ++k) {
    const auto& a = sorted_matches[k - 1];
    const auto& b = sorted_matches[k];
    if (b.hyp != a.hyp + 1 || b.ref != a.ref + 1) ++chunks;
  }
  return chunks;
}

MeteorAlignment meteor_align(TokenSpan hyp, TokenSpan ref, const MeteorParams& params) {
  std::vector<int> hyp_to_ref(hyp.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);
  MeteorAlignment alignment;

  run_stage(MatchStage::kExact, [&](std::size_t i, std::size_t j) { return hyp[i] == ref[j]; },
            hyp_to_ref, ref_used, alignment.matches);

  if (params.stem_stage) {
    std::vector<std::string> hyp_stems(hyp.size());
    std::vector<std::string> ref_stems(ref.size());
    for (std::size_t i = 0; i < hyp.size(); ++i) hyp_stems[i] = text::stem(hyp[i]);
    for (std::size_t j = 0; j < ref.size(); ++j) ref_stems[j] = text::stem(ref[j]);
    run_stage(MatchStage::kStem,
              [&](std::size_t i, std::size_t j) { return hyp_stems[i] == ref_stems[j]; },
              hyp_to_ref, ref_used, alignment.matches);
  }

  if (params.synonyms != nullptr) {
    const text::SynonymTable& table = *params.synonyms;
    run_stage(MatchStage::kSynonym,
              [&](std::size_t i, std::size_t j) { return table.synonyms(hyp[i], ref[j]); },
              hyp_to_ref, ref_used, alignment.matches);
  }

  std::sort(alignment.matches.begin(), alignment.matches.end(),
            [](const MeteorMatch& a, const MeteorMatch& b) { return a.hyp < b.hyp; });
  alignment.chunks = count_chunks(alignment.matches);
  return alignment;
}

MetricScore meteor(TokenSpan hyp, TokenSpan ref, const MeteorParams& params) {
  params.validate();
  MetricScore score;
  score.metric = Metric::kMeteor;
  const MeteorAlignment alignment = meteor_align(hyp, ref, params);
  const auto m = static_cast<double>(alignment.matches.size());
  if (alignment.matches.empty()) {
    score.components = Prf{};
    return score;
  }
  const double precision = m / static_cast<double>(hyp.size());
  const double recall = m / static_cast<double>(ref.size());
  const double f_mean =
      precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty =
      params.gamma * std::pow(static_cast<double>(alignment.chunks) / m, params.beta);
  score.value = 100.0 * f_mean * (1.0 - penalty);
  score.components = Prf{precision, recall, f_mean};
  return score;
}

}  // namespace coe::metrics
