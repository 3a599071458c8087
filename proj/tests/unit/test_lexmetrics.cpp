#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coe/error.hpp"
#include "coe/lexmetrics.hpp"
#include "oracle.hpp"

using namespace coe::metrics;
using coe::Metric;
using coe::text::tokenize;

namespace {

Tokens T(const char* s) { return tokenize(s); }

std::vector<Tokens> refs1(const char* s) { return {tokenize(s)}; }

std::vector<GenerationPair> load_pairs50() {
  std::ifstream in(COE_FIXTURE_DIR "/pairs50.jsonl");
  std::vector<GenerationPair> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    out.push_back({j.at("id").get<std::string>(), j.at("source").get<std::string>(),
                   j.at("hypothesis").get<std::string>(), j.at("reference").get<std::string>()});
  }
  return out;
}

Tokens random_tokens(std::mt19937& rng, std::size_t min_len, std::size_t max_len, int vocab) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  Tokens t(len(rng));
  for (auto& w : t) w = "w" + std::to_string(word(rng));
  return t;
}

}  // namespace

// Values frozen from NLTK's BLEU (tests/oracle/reference_values.txt).
TEST_CASE("bleu reference values") {
  CHECK(bleu(T("the cat"), refs1("the cat sat on the mat"), 1).value ==
        doctest::Approx(13.53352832366127).epsilon(1e-12));
  CHECK(bleu(T("the the cat sat on a mat mat"), refs1("the cat sat on the mat"), 1).value ==
        doctest::Approx(75.0).epsilon(1e-12));
  CHECK(bleu(T("the the cat sat on a mat mat"), refs1("the cat sat on the mat"), 2).value ==
        doctest::Approx(56.69467095138408).epsilon(1e-12));
}

TEST_CASE("bleu edge cases") {
  CHECK(bleu(T("the cat sat"), refs1("the cat sat"), 1).value == 100.0);
  CHECK(bleu(T("the cat sat"), refs1("the cat sat"), 2).value == 100.0);
  CHECK(bleu(T("cat"), refs1("cat"), 2).value == 100.0);
  CHECK(bleu(T("dog runs"), refs1("the cat sat"), 1, Smoothing::kNone).value == 0.0);
  CHECK(bleu(T("dog runs"), refs1("the cat sat"), 1, Smoothing::kEpsilon).value > 0.0);
  CHECK(bleu(Tokens{}, refs1("the cat"), 1).value == 0.0);
  CHECK_THROWS(bleu(T("a"), refs1("a"), 3));
}

TEST_CASE("bleu closest reference length prefers the shorter on ties") {
  const std::vector<Tokens> refs{T("a b"), T("a b c d"), T("a b c d e f")};
  CHECK(closest_ref_length(3, refs) == 2);
  CHECK(closest_ref_length(5, refs) == 4);
  CHECK(closest_ref_length(6, refs) == 6);
}

TEST_CASE("bleu clipping never credits more than the reference holds") {
  const auto s = bleu_stats(T("the the the the"), refs1("the cat the"), 1);
  CHECK(s.matches[0] == 2);
  CHECK(s.totals[0] == 4);
}

TEST_CASE("rouge reference values") {
  const auto r1 = rouge_n(T("the cat sat"), T("the cat lay down"), 1);
  CHECK(r1.value == doctest::Approx(400.0 / 7.0).epsilon(1e-12));
  REQUIRE(r1.components);
  CHECK(r1.components->precision == doctest::Approx(2.0 / 3.0));
  CHECK(r1.components->recall == doctest::Approx(0.5));
  CHECK(rouge_l(T("the cat sat"), T("the cat lay down")).value ==
        doctest::Approx(400.0 / 7.0).epsilon(1e-12));
  // Reversed distinct tokens: LCS 1, P = 1/4, R = 1/4.
  CHECK(rouge_l(T("a b c d"), T("d c b a")).value == doctest::Approx(25.0));
  CHECK(rouge_n(T("a b"), T("c d"), 1).value == 0.0);
  CHECK(rouge_n(T("a"), T("b"), 2).value == 100.0);  // vacuous: no bigrams on either side
  CHECK(rouge_n(T("a b"), T("a"), 2).value == 0.0);
  CHECK(rouge_l(Tokens{}, Tokens{}).value == 100.0);
  CHECK(rouge_l(Tokens{}, T("a")).value == 0.0);
}

TEST_CASE("rouge-1 recall never drops when an unmatched reference token is added") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens hyp = random_tokens(rng, 0, 8, 6);
    const Tokens ref = random_tokens(rng, 1, 8, 6);
    const double before = rouge_n(hyp, ref, 1).components->recall;
    // Find a reference token whose count in hyp is below its count in ref.
    for (const auto& w : ref) {
      const auto in_hyp = std::count(hyp.begin(), hyp.end(), w);
      const auto in_ref = std::count(ref.begin(), ref.end(), w);
      if (in_hyp < in_ref) {
        hyp.push_back(w);
        break;
      }
    }
    CHECK(rouge_n(hyp, ref, 1).components->recall >= before);
  }
}

TEST_CASE("lcs agrees with subsequence enumeration") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const Tokens a = random_tokens(rng, 0, 10, 3);
    const Tokens b = random_tokens(rng, 0, 10, 3);
    const auto l = lcs_length(a, b);
    CHECK(l == static_cast<std::size_t>(oracle::lcs_brute(a, b)));
    CHECK(l <= std::min(a.size(), b.size()));
  }
}

TEST_CASE("meteor reference values") {
  CHECK(meteor(T("a b c d e"), T("a b c d e")).value == doctest::Approx(99.6).epsilon(1e-12));
  CHECK(meteor(T("cat"), T("cat")).value == doctest::Approx(50.0).epsilon(1e-12));

  const auto stem = meteor_align(T("cats"), T("cat"), MeteorParams{});
  REQUIRE(stem.matches.size() == 1);
  CHECK(stem.matches[0].stage == MatchStage::kStem);

  MeteorParams exact_only;
  exact_only.stem_stage = false;
  CHECK(meteor(T("cats"), T("cat"), exact_only).value == 0.0);

  // Two swapped halves: m = 4, two chunks.
  const auto swapped = meteor_align(T("c d a b"), T("a b c d"), MeteorParams{});
  CHECK(swapped.matches.size() == 4);
  CHECK(swapped.chunks == 2);
  const double fmean = 1.0;
  CHECK(meteor(T("c d a b"), T("a b c d")).value ==
        doctest::Approx(100.0 * fmean * (1 - 0.5 * std::pow(0.5, 3))));
}

TEST_CASE("meteor prefers the reference position next to the previous match") {
  // Leftmost-free alone would pair the second "a" with ref[0]; adjacency keeps one chunk.
  const auto al = meteor_align(T("x a"), T("a x a"), MeteorParams{});
  REQUIRE(al.matches.size() == 2);
  CHECK(al.matches[0].ref == 1);
  CHECK(al.matches[1].ref == 2);
  CHECK(al.chunks == 1);
}

TEST_CASE("meteor synonym stage") {
  const auto table = coe::text::SynonymTable::parse("big\ts\nlarge\ts\n");
  MeteorParams with;
  with.synonyms = &table;
  const auto al = meteor_align(T("a big dog"), T("a large dog"), with);
  REQUIRE(al.matches.size() == 3);
  CHECK(al.matches[1].stage == MatchStage::kSynonym);
  CHECK(meteor_align(T("a big dog"), T("a large dog"), MeteorParams{}).matches.size() == 2);
}

TEST_CASE("meteor parameter validation") {
  MeteorParams bad;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(meteor(T("a"), T("a"), bad), coe::InputError);
  bad = {};
  bad.beta = 0;
  CHECK_THROWS_AS(meteor(T("a"), T("a"), bad), coe::InputError);
}

TEST_CASE("nist information weights and brevity") {
  const std::vector<Tokens> refs{T("w x y z")};
  const NistScorer scorer(refs);
  CHECK(scorer.info(T("w")) == doctest::Approx(2.0));  // log2(4 / 1)
  CHECK(scorer.info(T("w x")) == doctest::Approx(0.0));
  CHECK(scorer.info(T("q")) == 0.0);
  CHECK(scorer.sentence(T("w x y z"), refs[0]).value == doctest::Approx(2.0));
  CHECK(scorer.sentence(T("w x y z"), refs[0]).scaled == doctest::Approx(20.0));

  CHECK(nist_brevity_factor(2.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(nist_brevity_factor(1.0) == 1.0);
  CHECK(nist_brevity_factor(1.7) == 1.0);
  CHECK(nist_brevity_factor(0.5) <= 0.5);
  CHECK(nist_brevity_factor(0.0) == 0.0);
  CHECK_THROWS_AS(NistScorer(std::vector<Tokens>{Tokens{}}), coe::InputError);
}

// Values frozen from a port of the common SARI script (reference_values.txt).
TEST_CASE("sari reference values") {
  CHECK(sari(T("the cat sat"), T("the cat sat"), refs1("the cat sat")).value ==
        doctest::Approx(100.0).epsilon(1e-12));
  CHECK(sari(T("the cat sat"), T("the cat sat"), refs1("a dog ran fast")).value ==
        doctest::Approx(16.666666666666668).epsilon(1e-12));
  CHECK(sari(T("the cat sat on the mat"), Tokens{}, refs1("a cat sat")).value ==
        doctest::Approx(53.333333333333336).epsilon(1e-12));
  CHECK(sari(T("a b c d"), T("a b e"), refs1("a c e f")).value ==
        doctest::Approx(55.555555555555564).epsilon(1e-12));
  const std::vector<Tokens> two{T("the man sat down"), T("an old man sat")};
  CHECK(sari(T("the old man sat down"), T("the man sat"), two).value ==
        doctest::Approx(55.021367521367516).epsilon(1e-12));
}

TEST_CASE("every score stays in range on random input") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Tokens h = random_tokens(rng, 0, 9, 5);
    const Tokens r = random_tokens(rng, 1, 9, 5);
    const Tokens s = random_tokens(rng, 0, 9, 5);
    const std::vector<Tokens> rs{r};
    for (double v : {bleu(h, rs, 1).value, bleu(h, rs, 2).value, rouge_n(h, r, 1).value,
                     rouge_n(h, r, 2).value, rouge_l(h, r).value, meteor(h, r).value,
                     sari(s, h, rs).value}) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0 + 1e-9);
    }
    CHECK(NistScorer(rs).sentence(h, r).value >= 0.0);
  }
}

TEST_CASE("corpus aggregates match NLTK on the fixture") {
  auto pairs = load_pairs50();
  // NLTK pads empty per-sentence denominators, so compare on hypotheses of two or more tokens.
  std::erase_if(pairs, [](const GenerationPair& p) { return tokenize(p.hypothesis).size() < 2; });
  REQUIRE(pairs.size() == 45);
  const std::vector<Metric> set{Metric::kBleu1, Metric::kBleu2, Metric::kNist};
  const auto report = evaluate_corpus(pairs, {}, set);
  CHECK(*report.aggregate[Metric::kBleu1] == doctest::Approx(66.68980802748919).epsilon(1e-9));
  CHECK(*report.aggregate[Metric::kBleu2] == doctest::Approx(49.592678944987334).epsilon(1e-9));
  CHECK(*report.aggregate[Metric::kNist] == doctest::Approx(4.857817286205567).epsilon(1e-9));
  CHECK(*report.nist_scaled == doctest::Approx(48.57817286205567).epsilon(1e-9));
}

TEST_CASE("evaluate_corpus shape, identity and determinism") {
  const auto pairs = load_pairs50();
  const auto all = std::vector<Metric>(coe::kLexicalMetrics.begin(), coe::kLexicalMetrics.end());
  EvalParams one, four;
  four.jobs = 4;
  const auto a = evaluate_corpus(pairs, {}, all, one);
  const auto b = evaluate_corpus(pairs, {}, all, four);
  CHECK(a.rows.size() == 50);
  CHECK(a.metrics == all);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].id == pairs[i].id);
    CHECK(a.rows[i].values == b.rows[i].values);
  }
  CHECK(a.aggregate.values == b.aggregate.values);

  std::vector<GenerationPair> same;
  for (const auto& p : pairs) {
    if (!tokenize(p.reference).empty()) same.push_back({p.id, p.source, p.reference, p.reference});
  }
  const auto id = evaluate_corpus(same, {}, all);
  for (Metric m : {Metric::kBleu1, Metric::kBleu2, Metric::kRouge1, Metric::kRouge2, Metric::kRougeL}) {
    CHECK(*id.aggregate[m] == doctest::Approx(100.0).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_corpus input errors") {
  const std::vector<Metric> b1{Metric::kBleu1};
  CHECK_THROWS_AS(evaluate_corpus({}, {}, b1), coe::InputError);
  const std::vector<GenerationPair> dup{{"x", "", "a", "a"}, {"x", "", "b", "b"}};
  CHECK_THROWS_AS(evaluate_corpus(dup, {}, b1), coe::InputError);
  const std::vector<GenerationPair> one{{"x", "", "a", "a"}};
  const std::vector<Metric> ext{Metric::kBertScore};
  CHECK_THROWS_AS(evaluate_corpus(one, {}, ext), coe::InputError);
}
