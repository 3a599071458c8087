#include "coe/cli.hpp"

#include <charconv>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "coe/corpus.hpp"
#include "coe/csv.hpp"
#include "coe/error.hpp"
#include "coe/io.hpp"
#include "coe/lexmetrics.hpp"
#include "coe/prompt.hpp"
#include "coe/reporting.hpp"
#include "coe/stats.hpp"
#include "coe/textproc.hpp"

namespace coe::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr std::size_t kListedIds = 5;

// ------------------------------------------------------------------ options

struct CorpusArgs {
  std::string corpus;
  std::string schema;
};

struct SplitArgs {
  std::uint64_t seed = kDefaultSeed;
  std::string ratios = "0.75,0.125,0.125";
  bool stratify = false;
};

struct PromptArgs {
  std::string tokens;
  std::string hate_answer = "Yes";
  bool joint_target = false;
};

struct PrepareArgs {
  CorpusArgs corpus;
  SplitArgs split;
  PromptArgs prompt;
  std::string out_dir;
  std::string variant = "coe-full";
};

struct AblateArgs {
  CorpusArgs corpus;
  SplitArgs split;
  PromptArgs prompt;
  std::string out_dir;
};

struct EvaluateArgs {
  CorpusArgs corpus;
  std::string hypotheses;
  std::string out_dir;
  std::string metrics = "all";
  unsigned jobs = 1;
  std::string external;
  std::string tokens;
  std::string variant;
  bool parse_generated = false;
  bool no_lowercase = false;
  bool no_punct_split = false;
  bool no_normalize = false;
  bool no_stem = false;
  std::string synonyms;
  std::string label;
};

struct CorrelateArgs {
  std::vector<std::string> annotations;
  std::string primary;
  std::string scores;
  std::string out_dir;
  std::string metrics;
  int min_raters = 3;
  int threshold = 3;
  std::string level = "ordinal";
  double confidence = 0.95;
  double significance = 0.05;
};

struct ReportArgs {
  std::vector<std::string> rows;
  std::string correlations;
  std::string format = "markdown";
  std::string style = "table2";
  std::string out_dir;
};

// ------------------------------------------------------------------ helpers

ojson file_ref(const std::string& path) {
  return {{"path", path}, {"sha256", io::sha256_file(path)}};
}

void write_json(const fs::path& path, const ojson& j) { io::write_file(path, j.dump(2) + "\n"); }

void write_run_config(const std::string& out_dir, ojson config) {
  ojson full;
  full["tool_version"] = io::tool_version();
  for (auto& [k, v] : config.items()) full[k] = v;
  write_json(fs::path(out_dir) / "run_config.json", full);
}

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kListedIds; ++i) {
    if (i > 0) out += ", ";
    out += ids[i];
  }
  if (ids.size() > kListedIds) out += fmt::format(", ... ({} more)", ids.size() - kListedIds);
  return out;
}

corpus::SplitRatios parse_ratios(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size()) {
      throw InputError(fmt::format("--ratios: '{}' is not a number", piece));
    }
    parts.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw InputError("--ratios needs train,validation,test");
  return {parts[0], parts[1], parts[2]};
}

prompt::SpecialTokens parse_tokens(const std::string& spec) {
  auto tokens = spec.empty() ? prompt::SpecialTokens{} : prompt::SpecialTokens::parse(spec);
  tokens.validate();
  return tokens;
}

prompt::PromptVariant parse_variant_arg(const std::string& name) {
  auto v = prompt::parse_variant(name);
  if (!v) throw InputError(fmt::format("unknown variant '{}'", name));
  return *v;
}

struct LoadedCorpus {
  corpus::LoadResult load;
  corpus::SchemaMap schema;
};

LoadedCorpus load_corpus_arg(const CorpusArgs& args, std::ostream& err) {
  LoadedCorpus out;
  out.schema = corpus::SchemaMap::parse(args.schema);
  out.load = corpus::load_corpus(args.corpus, out.schema);
  if (!out.load.rejections.empty()) {
    err << fmt::format("{}: {} of {} line(s) rejected\n", args.corpus,
                       out.load.rejections.size(), out.load.line_count);
  }
  return out;
}

ojson corpus_config(const CorpusArgs& args, const LoadedCorpus& c) {
  ojson j = file_ref(args.corpus);
  j["schema"] = c.schema.to_json();
  j["records"] = c.load.records.size();
  j["rejected"] = c.load.rejections.size();
  return j;
}

ojson split_config(const SplitArgs& args, const corpus::SplitRatios& r) {
  return {{"seed", args.seed},
          {"ratios", {r.train, r.validation, r.test}},
          {"stratify", args.stratify}};
}

struct SetSummary {
  std::vector<prompt::EmitIssue> skipped;
  std::map<std::string, std::size_t> written;
};

// Writes the three training files and the test inference file for one
// variant. A record skipped in several files is listed once.
SetSummary write_prompt_set(const fs::path& dir, const corpus::CorpusSplit& split,
                            prompt::PromptVariant variant, const prompt::SpecialTokens& tokens,
                            const prompt::PromptOptions& options) {
  SetSummary summary;
  std::set<std::string> seen;
  auto emit = [&](std::span<const corpus::HateRecord> records, prompt::PromptMode mode,
                  const std::string& name) {
    auto result = prompt::emit_prompt_file(records, variant, tokens, mode, dir / name, options);
    summary.written[name] = result.written;
    for (auto& issue : result.skipped) {
      if (seen.insert(issue.record_id).second) summary.skipped.push_back(std::move(issue));
    }
  };
  emit(split.train, prompt::PromptMode::kTraining, "train.jsonl");
  emit(split.validation, prompt::PromptMode::kTraining, "validation.jsonl");
  emit(split.test, prompt::PromptMode::kTraining, "test.jsonl");
  emit(split.test, prompt::PromptMode::kInference, "test.inference.jsonl");

  std::string lines;
  for (const auto& issue : summary.skipped) {
    lines += ojson{{"id", issue.record_id}, {"reason", issue.reason}}.dump() + "\n";
  }
  io::write_file(dir / "skipped.jsonl", lines);
  return summary;
}

void report_skipped(std::ostream& err, prompt::PromptVariant variant, const SetSummary& s) {
  if (s.skipped.empty()) return;
  std::vector<std::string> ids;
  for (const auto& issue : s.skipped) ids.push_back(issue.record_id);
  err << fmt::format("{}: {} record(s) skipped ({}): {}\n", prompt::variant_name(variant),
                     s.skipped.size(), s.skipped.front().reason, list_ids(ids));
}

ojson written_json(const SetSummary& s) {
  ojson j = ojson::object();
  for (const auto& [name, n] : s.written) j[name] = n;
  j["skipped"] = s.skipped.size();
  return j;
}

struct PreparedSplit {
  LoadedCorpus corpus;
  corpus::SplitRatios ratios;
  corpus::CorpusSplit split;
};

PreparedSplit load_and_split(const CorpusArgs& cargs, const SplitArgs& sargs,
                             const std::string& out_dir, std::ostream& err) {
  PreparedSplit p{load_corpus_arg(cargs, err), parse_ratios(sargs.ratios), {}};
  io::write_file(fs::path(out_dir) / "rejections.jsonl",
                 corpus::rejections_to_jsonl(p.corpus.load.rejections));
  if (p.corpus.load.records.empty()) {
    throw InputError(fmt::format("{}: no valid records", cargs.corpus));
  }
  p.split = corpus::split_corpus(p.corpus.load.records, p.ratios, sargs.seed, sargs.stratify);
  write_json(fs::path(out_dir) / "split.json", p.split.manifest());
  return p;
}

prompt::PromptOptions prompt_options(const PromptArgs& a) {
  prompt::PromptOptions o;
  o.hate_answer = a.hate_answer;
  o.baseline_joint_target = a.joint_target;
  return o;
}

// ------------------------------------------------------------------ commands

int cmd_prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  const auto variant = parse_variant_arg(a.variant);
  const auto tokens = parse_tokens(a.prompt.tokens);
  const auto options = prompt_options(a.prompt);
  auto p = load_and_split(a.corpus, a.split, a.out_dir, err);

  const auto summary = write_prompt_set(a.out_dir, p.split, variant, tokens, options);
  report_skipped(err, variant, summary);

  write_run_config(a.out_dir, {{"subcommand", "prepare"},
                               {"corpus", corpus_config(a.corpus, p.corpus)},
                               {"out_dir", a.out_dir},
                               {"split", split_config(a.split, p.ratios)},
                               {"variant", prompt::variant_name(variant)},
                               {"tokens", tokens.to_json()},
                               {"options", options.to_json()},
                               {"written", written_json(summary)}});
  out << fmt::format("prepared {}: train {}, validation {}, test {}\n", prompt::variant_name(variant),
                     p.split.train.size(), p.split.validation.size(), p.split.test.size());
  return 0;
}

int cmd_ablate(const AblateArgs& a, std::ostream& out, std::ostream& err) {
  const auto tokens = parse_tokens(a.prompt.tokens);
  const auto options = prompt_options(a.prompt);
  auto p = load_and_split(a.corpus, a.split, a.out_dir, err);

  ojson variants = ojson::object();
  for (auto variant : prompt::kAblationVariants) {
    const std::string name(prompt::variant_name(variant));
    const auto summary =
        write_prompt_set(fs::path(a.out_dir) / name, p.split, variant, tokens, options);
    report_skipped(err, variant, summary);
    variants[name] = written_json(summary);
  }

  write_run_config(a.out_dir, {{"subcommand", "ablate"},
                               {"corpus", corpus_config(a.corpus, p.corpus)},
                               {"out_dir", a.out_dir},
                               {"split", split_config(a.split, p.ratios)},
                               {"tokens", tokens.to_json()},
                               {"options", options.to_json()},
                               {"variants", variants}});
  out << fmt::format("ablation sets written for {} variants\n", prompt::kAblationVariants.size());
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const auto requested = parse_metric_list(a.metrics);
  std::vector<Metric> lexical;
  bool wants_external = false;
  for (Metric m : requested) {
    if (is_external(m)) {
      wants_external = true;
    } else {
      lexical.push_back(m);
    }
  }
  if (wants_external && a.external.empty()) {
    throw InputError("BS, BL and NU are read from --external; they cannot be computed here");
  }
  if (lexical.empty()) throw InputError("--metrics selects no lexical metric");

  const auto variant = parse_variant_arg(a.variant.empty() ? "coe-full" : a.variant);
  const auto tokens = parse_tokens(a.tokens);

  auto corpus = load_corpus_arg(a.corpus, err);
  std::map<std::string, const corpus::HateRecord*> by_id;
  for (const auto& r : corpus.load.records) by_id.emplace(r.id, &r);

  const auto hyps = parse_hypotheses(io::read_file(a.hypotheses));
  std::vector<std::string> unmatched;
  for (const auto& h : hyps) {
    if (by_id.count(h.id) == 0) unmatched.push_back(h.id);
  }
  if (!unmatched.empty()) {
    throw InputError(fmt::format("{} hypothesis id(s) not in the corpus: {}", unmatched.size(),
                                 list_ids(unmatched)));
  }

  std::vector<metrics::GenerationPair> pairs;
  std::vector<std::string> unparsed;
  pairs.reserve(hyps.size());
  for (const auto& h : hyps) {
    const auto* rec = by_id.at(h.id);
    std::string hypothesis = h.hypothesis;
    if (a.parse_generated) {
      auto parsed = prompt::parse_generated(h.hypothesis, variant, tokens);
      if (parsed.nle) {
        hypothesis = *parsed.nle;
      } else {
        hypothesis.clear();
        unparsed.push_back(h.id);
      }
    }
    pairs.push_back({h.id, rec->text, std::move(hypothesis), rec->implied_statement});
  }

  text::TokenizerConfig tok;
  tok.lowercase = !a.no_lowercase;
  tok.punctuation_split = !a.no_punct_split;
  tok.unicode_normalize = !a.no_normalize;

  text::SynonymTable synonyms;
  metrics::EvalParams params;
  params.jobs = a.jobs;
  params.meteor.stem_stage = !a.no_stem;
  if (!a.synonyms.empty()) {
    synonyms = text::SynonymTable::load(a.synonyms);
    params.meteor.synonyms = &synonyms;
  }

  auto report = metrics::evaluate_corpus(pairs, tok, lexical, params);
  ojson inputs;
  inputs["corpus"] = file_ref(a.corpus.corpus);
  inputs["hypotheses"] = file_ref(a.hypotheses);
  if (!a.synonyms.empty()) inputs["synonyms"] = file_ref(a.synonyms);
  if (!a.label.empty()) report.provenance["label"] = a.label;
  if (!a.variant.empty()) report.provenance["variant"] = prompt::variant_name(variant);
  for (const auto& id : unparsed) {
    report.flags.push_back(fmt::format("no explanation found in output for '{}'", id));
  }

  if (!a.external.empty()) {
    std::set<std::string> ids;
    for (const auto& pr : pairs) ids.insert(pr.id);
    const auto ext = reporting::ingest_external_scores(a.external, ids);
    inputs["external"] = file_ref(a.external);
    reporting::merge_external(report, ext);
  }
  report.provenance["inputs"] = inputs;

  const fs::path dir(a.out_dir);
  io::write_file(dir / "per_pair.csv", reporting::render_pairs_csv(report));
  io::write_file(dir / "aggregate.csv", reporting::render_aggregate_csv(report));
  io::write_file(dir / "report.md",
                 reporting::render_report(report, reporting::Format::kMarkdown,
                                          a.variant.empty() ? reporting::Style::kTable2
                                                            : reporting::Style::kTable3));
  write_json(dir / "report.json", reporting::report_json(report));

  write_run_config(a.out_dir, {{"subcommand", "evaluate"},
                               {"inputs", inputs},
                               {"out_dir", a.out_dir},
                               {"schema", corpus.schema.to_json()},
                               {"metrics", a.metrics},
                               {"tokenizer", tok.to_json()},
                               {"params", params.to_json()},
                               {"jobs", a.jobs},
                               {"parse_generated", a.parse_generated},
                               {"variant", prompt::variant_name(variant)},
                               {"tokens", tokens.to_json()},
                               {"label", a.label}});
  for (const auto& f : report.flags) err << "note: " << f << "\n";
  out << fmt::format("evaluated {} pair(s)\n", pairs.size());
  return 0;
}

struct Pool {
  std::string name;
  std::string path;
  std::vector<stats::AnnotationRecord> annotations;
};

ojson alpha_json(std::span<const stats::AnnotationRecord> ann, stats::AlphaLevel level,
                 const std::vector<std::string>* samples) {
  ojson j;
  for (auto d : stats::kDimensions) {
    j[std::string(stats::dimension_name(d))] =
        stats::krippendorff_alpha(stats::rating_matrix(ann, d, samples), level);
  }
  return j;
}

int cmd_correlate(const CorrelateArgs& a, std::ostream& out, std::ostream& /*err*/) {
  const auto level = stats::parse_level(a.level);
  if (!level) throw InputError(fmt::format("unknown --level '{}'", a.level));
  if (a.min_raters < 2) throw InputError("--min-raters must be at least 2");

  std::vector<Pool> pools;
  for (std::size_t i = 0; i < a.annotations.size(); ++i) {
    const auto& spec = a.annotations[i];
    const auto eq = spec.find('=');
    Pool pool;
    pool.name = eq == std::string::npos ? fmt::format("pool{}", i + 1) : spec.substr(0, eq);
    pool.path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    pool.annotations = stats::load_annotations(pool.path);
    for (const auto& other : pools) {
      if (other.name == pool.name) throw InputError(fmt::format("duplicate pool name '{}'", pool.name));
    }
    pools.push_back(std::move(pool));
  }
  const Pool* primary = &pools.front();
  if (!a.primary.empty()) {
    primary = nullptr;
    for (const auto& p : pools) {
      if (p.name == a.primary) primary = &p;
    }
    if (!primary) throw InputError(fmt::format("--primary '{}' names no pool", a.primary));
  }

  const auto consensus = stats::aggregate_consensus(primary->annotations, a.min_raters, a.threshold);
  std::vector<stats::ConsensusSample> retained;
  std::vector<std::string> kept_ids, removed_ids;
  for (const auto& s : consensus.samples) {
    if (s.retained) {
      retained.push_back(s);
      kept_ids.push_back(s.sample_id);
    } else {
      removed_ids.push_back(s.sample_id);
    }
  }
  if (retained.empty()) {
    throw InputError(fmt::format("no sample has {} or more agreeing raters", a.min_raters));
  }

  // Agreement per pool over every annotated sample, plus the primary pool
  // restricted to the retained samples.
  ojson alpha;
  alpha["level"] = stats::level_name(*level);
  ojson pool_list = ojson::array();
  ojson inputs = ojson::object();
  for (const auto& p : pools) {
    ojson pj;
    pj["name"] = p.name;
    pj["alpha"] = alpha_json(p.annotations, *level, nullptr);
    pool_list.push_back(pj);
    inputs[p.name] = file_ref(p.path);
  }
  alpha["pools"] = pool_list;
  alpha["primary"] = primary->name;
  alpha["retained"] = alpha_json(primary->annotations, *level, &kept_ids);

  ojson cons;
  cons["pool"] = primary->name;
  cons["min_raters"] = a.min_raters;
  cons["disagreement_threshold"] = a.threshold;
  cons["samples"] = consensus.samples.size();
  cons["retained"] = kept_ids.size();
  cons["removed"] = removed_ids;
  ojson dropped = ojson::array();
  for (const auto& d : consensus.dropped) dropped.push_back({{"id", d.sample_id}, {"raters", d.n_raters}});
  cons["too_few_raters"] = dropped;

  std::string cons_csv = csv::format_row(std::vector<std::string>{
      "sample_id", "n_raters", "median_informativeness", "median_clarity", "retained"});
  for (const auto& s : consensus.samples) {
    cons_csv += csv::format_row(std::vector<std::string>{
        s.sample_id, std::to_string(s.n_raters), csv::format_full(s.median_informativeness),
        csv::format_full(s.median_clarity), s.retained ? "true" : "false"});
  }

  ojson ci_json;
  ci_json["confidence"] = a.confidence;
  ci_json["n"] = retained.size();
  std::string ci_md;
  for (auto d : stats::kDimensions) {
    std::vector<double> medians;
    for (const auto& s : retained) medians.push_back(s.median(d));
    const auto ci = stats::mean_ci(medians, a.confidence);
    std::string name(stats::dimension_name(d));
    ci_json[name] = {{"mean", ci.mean}, {"lower", ci.lower}, {"upper", ci.upper}};
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    ci_md += fmt::format("{}: {}\n", name, stats::format_mean_ci(ci, a.confidence));
  }

  const auto score_rows = reporting::parse_score_csv(io::read_file(a.scores));
  stats::PerSampleScores scores;
  for (const auto& row : score_rows) {
    if (!scores.emplace(row.id, row).second) {
      throw InputError(fmt::format("{}: duplicate id '{}'", a.scores, row.id));
    }
  }
  std::vector<Metric> metric_set;
  if (a.metrics.empty()) {
    for (Metric m : kAllMetrics) {
      for (const auto& row : score_rows) {
        if (row[m]) {
          metric_set.push_back(m);
          break;
        }
      }
    }
  } else if (a.metrics == "all") {
    metric_set.assign(kAllMetrics.begin(), kAllMetrics.end());
  } else {
    metric_set = parse_metric_list(a.metrics);
  }
  inputs["scores"] = file_ref(a.scores);
  const auto table = stats::correlate_metrics(retained, scores, metric_set, a.significance);

  const fs::path dir(a.out_dir);
  write_json(dir / "alpha.json", alpha);
  write_json(dir / "consensus.json", cons);
  io::write_file(dir / "consensus.csv", cons_csv);
  write_json(dir / "human_ci.json", ci_json);
  io::write_file(dir / "human_ci.md", ci_md);
  io::write_file(dir / "correlations.csv",
                 reporting::render_correlations(table, reporting::Format::kCsv));
  io::write_file(dir / "correlations.md",
                 reporting::render_correlations(table, reporting::Format::kMarkdown));

  std::vector<std::string> metric_codes;
  for (Metric m : metric_set) metric_codes.emplace_back(metric_code(m));
  write_run_config(a.out_dir, {{"subcommand", "correlate"},
                               {"inputs", inputs},
                               {"out_dir", a.out_dir},
                               {"primary", primary->name},
                               {"metrics", metric_codes},
                               {"min_raters", a.min_raters},
                               {"disagreement_threshold", a.threshold},
                               {"level", stats::level_name(*level)},
                               {"confidence", a.confidence},
                               {"significance", a.significance}});
  out << fmt::format("retained {} of {} sample(s); correlations for {} metric(s)\n",
                     kept_ids.size(), consensus.samples.size(), metric_set.size());
  return 0;
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& /*err*/) {
  const auto format = reporting::parse_format(a.format);
  if (!format) throw InputError(fmt::format("unknown --format '{}'", a.format));
  const auto style = reporting::parse_style(a.style);
  if (!style) throw InputError(fmt::format("unknown --style '{}'", a.style));

  ojson inputs = ojson::array();
  std::string document;
  if (*style == reporting::Style::kTable4) {
    if (a.correlations.empty()) throw InputError("table4 needs --correlations");
    document = reporting::render_correlations(
        reporting::parse_correlations_csv(io::read_file(a.correlations)), *format);
    inputs.push_back(file_ref(a.correlations));
  } else {
    if (a.rows.empty()) throw InputError("table2/table3 need at least one --row label=path");
    std::vector<reporting::SummaryRow> rows;
    for (const auto& spec : a.rows) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw InputError(fmt::format("--row '{}': expected label=path", spec));
      }
      std::string label = spec.substr(0, eq);
      const std::string path = spec.substr(eq + 1);
      const auto table = reporting::parse_score_csv(io::read_file(path));
      if (table.empty()) throw InputError(fmt::format("{}: no score rows", path));
      // Aggregate files hold one row; full reports end with the corpus row.
      const ScoreRow* pick = &table.back();
      for (const auto& r : table) {
        if (r.id == "corpus") pick = &r;
      }
      if (*style == reporting::Style::kTable3) {
        if (auto v = prompt::parse_variant(label)) label = reporting::variant_row_label(*v, label);
      }
      rows.push_back({label, *pick});
      ojson ref = file_ref(path);
      ref["label"] = label;
      inputs.push_back(ref);
    }
    document = reporting::render_summary(rows, *format, *style);
  }

  if (!a.out_dir.empty()) {
    const fs::path dir(a.out_dir);
    io::write_file(dir / (*format == reporting::Format::kCsv ? "table.csv" : "table.md"), document);
    write_run_config(a.out_dir, {{"subcommand", "report"},
                                 {"inputs", inputs},
                                 {"out_dir", a.out_dir},
                                 {"format", a.format},
                                 {"style", a.style}});
  }
  out << document;
  return 0;
}

// ------------------------------------------------------------------ wiring

void add_corpus(CLI::App* app, CorpusArgs& c) {
  app->add_option("--corpus", c.corpus, "Corpus JSON Lines file")->required()->check(CLI::ExistingFile);
  app->add_option("--schema", c.schema, "Field overrides, e.g. text=tweet,target_group=group");
}

void add_split(CLI::App* app, SplitArgs& s) {
  app->add_option("--seed", s.seed, "Shuffle seed")->capture_default_str();
  app->add_option("--ratios", s.ratios, "train,validation,test")->capture_default_str();
  app->add_flag("--stratify", s.stratify, "Split per category");
}

void add_prompt(CLI::App* app, PromptArgs& p) {
  app->add_option("--tokens", p.tokens, "start=..,sep=..,end=..");
  app->add_option("--hate-answer", p.hate_answer, "Answer after the hate question")->capture_default_str();
  app->add_flag("--joint-target", p.joint_target, "Baseline: completion is target <sep> explanation");
}

}  // namespace

std::vector<HypothesisRecord> parse_hypotheses(std::string_view content) {
  std::vector<HypothesisRecord> out;
  std::set<std::string> seen;
  const auto lines = io::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error&) {
      throw InputError(fmt::format("hypotheses line {}: malformed JSON", i + 1));
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("hypothesis") ||
        !j["hypothesis"].is_string()) {
      throw InputError(fmt::format("hypotheses line {}: expected string id and hypothesis", i + 1));
    }
    HypothesisRecord rec{j["id"].get<std::string>(), j["hypothesis"].get<std::string>()};
    if (!seen.insert(rec.id).second) {
      throw InputError(fmt::format("hypotheses line {}: duplicate id '{}'", i + 1, rec.id));
    }
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw InputError("hypotheses file holds no records");
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chain-of-explanation prompt preparation and explanation evaluation", "coe"};
  app.set_version_flag("--version", io::tool_version());
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* sp = app.add_subcommand("prepare", "Split a corpus and write prompt files for one variant");
  add_corpus(sp, prep.corpus);
  add_split(sp, prep.split);
  add_prompt(sp, prep.prompt);
  sp->add_option("--out-dir", prep.out_dir, "Output directory")->required();
  sp->add_option("--variant", prep.variant, "baseline, coe-full, coe-no-heuristic, coe-no-hate-label, coe-no-target")
      ->capture_default_str();

  AblateArgs abl;
  auto* sa = app.add_subcommand("ablate", "Write prompt files for the full prompt and its ablations");
  add_corpus(sa, abl.corpus);
  add_split(sa, abl.split);
  add_prompt(sa, abl.prompt);
  sa->add_option("--out-dir", abl.out_dir, "Output directory")->required();

  EvaluateArgs ev;
  auto* se = app.add_subcommand("evaluate", "Score generated explanations against the references");
  add_corpus(se, ev.corpus);
  se->add_option("--hypotheses", ev.hypotheses, "JSON Lines {id, hypothesis}")->required()->check(CLI::ExistingFile);
  se->add_option("--out-dir", ev.out_dir, "Output directory")->required();
  se->add_option("--metrics", ev.metrics, "Comma-separated metric codes or 'all'")->capture_default_str();
  se->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 256u));
  se->add_option("--external", ev.external, "BS/BL/NU scores, JSON Lines")->check(CLI::ExistingFile);
  se->add_option("--tokens", ev.tokens, "Special tokens for --parse-generated");
  se->add_option("--variant", ev.variant, "Prompt variant of the generating model");
  se->add_flag("--parse-generated", ev.parse_generated, "Hypotheses are raw model output");
  se->add_flag("--no-lowercase", ev.no_lowercase, "Keep case when tokenizing");
  se->add_flag("--no-punct-split", ev.no_punct_split, "Keep punctuation attached");
  se->add_flag("--no-normalize", ev.no_normalize, "Skip NFC normalization");
  se->add_flag("--no-stem", ev.no_stem, "Disable the Meteor stem stage");
  se->add_option("--synonyms", ev.synonyms, "word<TAB>set_id table for the Meteor synonym stage")
      ->check(CLI::ExistingFile);
  se->add_option("--label", ev.label, "Row label in report.md");

  CorrelateArgs co;
  auto* sc = app.add_subcommand("correlate", "Human agreement, consensus and metric correlations");
  sc->add_option("--annotations", co.annotations, "[pool=]annotations.csv, repeatable")->required();
  sc->add_option("--primary", co.primary, "Pool used for consensus and correlations (default: first)");
  sc->add_option("--scores", co.scores, "Per-pair score CSV from evaluate")->required()->check(CLI::ExistingFile);
  sc->add_option("--out-dir", co.out_dir, "Output directory")->required();
  sc->add_option("--metrics", co.metrics, "Metric codes (default: columns with scores)");
  sc->add_option("--min-raters", co.min_raters, "Minimum annotations per sample")->capture_default_str();
  sc->add_option("--threshold", co.threshold, "Largest tolerated max-min rating range")->capture_default_str();
  sc->add_option("--level", co.level, "nominal, ordinal or interval")->capture_default_str();
  sc->add_option("--confidence", co.confidence, "Confidence level of the mean intervals")
      ->capture_default_str()->check(CLI::Range(0.5, 0.999999));
  sc->add_option("--significance", co.significance, "Star correlations with p below this")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));

  ReportArgs rep;
  auto* sr = app.add_subcommand("report", "Render score or correlation tables");
  sr->add_option("--row", rep.rows, "label=scores.csv, repeatable (table2/table3)");
  sr->add_option("--correlations", rep.correlations, "correlations.csv (table4)");
  sr->add_option("--format", rep.format, "markdown or csv")->capture_default_str();
  sr->add_option("--style", rep.style, "table2, table3 or table4")->capture_default_str();
  sr->add_option("--out-dir", rep.out_dir, "Also write the table and run_config.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kInputInvalid);
  }

  try {
    if (sp->parsed()) return cmd_prepare(prep, out, err);
    if (sa->parsed()) return cmd_ablate(abl, out, err);
    if (se->parsed()) return cmd_evaluate(ev, out, err);
    if (sc->parsed()) return cmd_correlate(co, out, err);
    if (sr->parsed()) return cmd_report(rep, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIoFailed);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kComputeFailed);
  }
  return static_cast<int>(ExitCode::kInputInvalid);
}

}  // namespace coe::cli
