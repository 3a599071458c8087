#include <algorithm>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/io.hpp"
#include "coe/lexmetrics.hpp"

namespace coe::metrics {
namespace {

struct TokenizedPair {
  Tokens source;
  Tokens hyp;
  std::vector<Tokens> refs;  // single reference, held as a list for the APIs
};

bool wants(std::span<const Metric> set, Metric m) {
  return std::find(set.begin(), set.end(), m) != set.end();
}

ScoreRow score_pair(const GenerationPair& pair, const TokenizedPair& t,
                    std::span<const Metric> set, const EvalParams& params,
                    const NistScorer* nist) {
  ScoreRow row;
  row.id = pair.id;
  const TokenSpan ref = t.refs.front();
  for (Metric m : set) {
    switch (m) {
      case Metric::kBleu1:
        row[m] = bleu(t.hyp, t.refs, 1, params.sentence_smoothing, params.epsilon).value;
        break;
      case Metric::kBleu2:
        row[m] = bleu(t.hyp, t.refs, 2, params.sentence_smoothing, params.epsilon).value;
        break;
      case Metric::kMeteor:
        row[m] = meteor(t.hyp, ref, params.meteor).value;
        break;
      case Metric::kNist:
        row[m] = nist->sentence(t.hyp, ref).value;
        break;
      case Metric::kRouge1:
        row[m] = rouge_n(t.hyp, ref, 1).value;
        break;
      case Metric::kRouge2:
        row[m] = rouge_n(t.hyp, ref, 2).value;
        break;
      case Metric::kRougeL:
        row[m] = rouge_l(t.hyp, ref).value;
        break;
      case Metric::kSari:
        row[m] = sari(t.source, t.hyp, t.refs, params.sari_max_n).value;
        break;
      default:
        break;
    }
  }
  return row;
}

/// Runs body(i) for i in [0, n) over `jobs` threads with contiguous blocks.
template <class Body>
void parallel_for(std::size_t n, unsigned jobs, Body body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w * block; i < std::min(n, (w + 1) * block); ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

nlohmann::ordered_json EvalParams::to_json() const {
  return {{"sentence_smoothing", sentence_smoothing == Smoothing::kEpsilon ? "epsilon" : "none"},
          {"epsilon", epsilon},
          {"corpus_bleu_smoothing", "none"},
          {"meteor", meteor.to_json()},
          {"nist_max_n", nist_max_n},
          {"sari_max_n", sari_max_n}};
}

MetricReport evaluate_corpus(std::span<const GenerationPair> pairs,
                             const text::TokenizerConfig& tokenizer,
                             std::span<const Metric> metric_set, const EvalParams& params) {
  if (pairs.empty()) throw InputError("no generation pairs to evaluate");
  for (Metric m : metric_set) {
    if (is_external(m)) {
      throw InputError(fmt::format("metric '{}' is not computed here; pass it as external scores",
                                   metric_code(m)));
    }
  }
  params.meteor.validate();
  {
    std::unordered_set<std::string> ids;
    for (const auto& p : pairs) {
      if (!ids.insert(p.id).second) throw InputError(fmt::format("duplicate pair id '{}'", p.id));
    }
  }

  // Report columns follow table order regardless of how the set was given.
  std::vector<Metric> columns;
  for (Metric m : kLexicalMetrics) {
    if (wants(metric_set, m)) columns.push_back(m);
  }

  std::vector<TokenizedPair> tokenized(pairs.size());
  parallel_for(pairs.size(), params.jobs, [&](std::size_t i) {
    tokenized[i].source = text::tokenize(pairs[i].source, tokenizer);
    tokenized[i].hyp = text::tokenize(pairs[i].hypothesis, tokenizer);
    tokenized[i].refs = {text::tokenize(pairs[i].reference, tokenizer)};
  });

  std::optional<NistScorer> nist;
  std::vector<Tokens> references;
  std::vector<Tokens> hypotheses;
  references.reserve(pairs.size());
  hypotheses.reserve(pairs.size());
  for (const auto& t : tokenized) {
    references.push_back(t.refs.front());
    hypotheses.push_back(t.hyp);
  }
  if (wants(columns, Metric::kNist)) nist.emplace(references, params.nist_max_n);

  MetricReport report;
  report.metrics = columns;
  report.rows.resize(pairs.size());
  parallel_for(pairs.size(), params.jobs, [&](std::size_t i) {
    report.rows[i] = score_pair(pairs[i], tokenized[i], columns, params, nist ? &*nist : nullptr);
  });

  const auto n = static_cast<double>(pairs.size());
  for (Metric m : columns) {
    switch (m) {
      case Metric::kBleu1:
      case Metric::kBleu2: {
        const std::size_t order = m == Metric::kBleu1 ? 1 : 2;
        BleuStats total;
        total.max_n = order;
        for (const auto& t : tokenized) total += bleu_stats(t.hyp, t.refs, order);
        report.aggregate[m] = 100.0 * bleu_from_stats(total, Smoothing::kNone);
        break;
      }
      case Metric::kNist: {
        const MetricScore corpus = nist->corpus(hypotheses);
        report.aggregate[m] = corpus.value;
        report.nist_scaled = corpus.scaled;
        break;
      }
      default: {
        double sum = 0.0;
        for (const ScoreRow& row : report.rows) sum += *row[m];
        report.aggregate[m] = sum / n;
      }
    }
  }

  nlohmann::ordered_json metric_names = nlohmann::ordered_json::array();
  for (Metric m : columns) metric_names.push_back(metric_code(m));
  report.provenance["tool_version"] = io::tool_version();
  report.provenance["tokenizer"] = tokenizer.to_json();
  report.provenance["params"] = params.to_json();
  report.provenance["metrics"] = metric_names;
  report.provenance["aggregation"] = {{"B1", "corpus"}, {"B2", "corpus"}, {"NI", "corpus"},
                                      {"M", "mean"},    {"R1", "mean"},   {"R2", "mean"},
                                      {"R-L", "mean"},  {"S", "mean"}};
  report.provenance["pairs"] = pairs.size();
  return report;
}

}  // namespace coe::metrics
