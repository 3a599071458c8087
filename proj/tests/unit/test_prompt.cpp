#include <doctest.h>

#include <nlohmann/json.hpp>

#include "coe/error.hpp"
#include "coe/io.hpp"
#include "coe/prompt.hpp"

using namespace coe::prompt;
using coe::corpus::HateRecord;

namespace {

HateRecord sample() {
  HateRecord r;
  r.id = "r1";
  r.text = "they keep  coming\n here";
  r.target_group = "immigrants";
  r.implied_statement = "immigrants are invaders";
  return r;
}

std::vector<SegmentRole> roles(const PromptSequence& seq) {
  std::vector<SegmentRole> out;
  for (const auto& s : seq.segments) out.push_back(s.role);
  return out;
}

}  // namespace

TEST_CASE("full chain-of-explanation prompt renders literally") {
  const auto seq = build_training_prompt(sample(), PromptVariant::kCoEFull, SpecialTokens{});
  CHECK(seq.render() ==
        "<|startoftext|>Given Text: they keep coming here<|sep|>Is the text hateful? Yes<|sep|>"
        "The target group is: immigrants<|sep|>It is hateful because: immigrants are invaders"
        "<|endoftext|>");
  CHECK(seq.record_id == "r1");
  using R = SegmentRole;
  CHECK(roles(seq) == std::vector<R>{R::kStartToken, R::kHeuristicText, R::kGivenText,
                                     R::kSeparator, R::kHateDemonstration, R::kSeparator,
                                     R::kTargetDemonstration, R::kSeparator, R::kHeuristicNle,
                                     R::kNleText, R::kEndToken});
}

TEST_CASE("baseline prompt") {
  const auto seq = build_training_prompt(sample(), PromptVariant::kBaseline, SpecialTokens{});
  CHECK(seq.render() ==
        "<|startoftext|>they keep coming here<|sep|>immigrants are invaders<|endoftext|>");
  PromptOptions joint;
  joint.baseline_joint_target = true;
  CHECK(build_training_prompt(sample(), PromptVariant::kBaseline, SpecialTokens{}, joint).render() ==
        "<|startoftext|>they keep coming here<|sep|>immigrants<|sep|>immigrants are invaders"
        "<|endoftext|>");
  CHECK(build_inference_prefix(sample(), PromptVariant::kBaseline, SpecialTokens{}, joint).render() ==
        "<|startoftext|>they keep coming here<|sep|>");
}

TEST_CASE("each ablation removes exactly its own segments") {
  const SpecialTokens tok;
  const auto full = build_training_prompt(sample(), PromptVariant::kCoEFull, tok).segments;
  auto without = [&](std::initializer_list<std::size_t> drop) {
    std::vector<Segment> out;
    for (std::size_t i = 0; i < full.size(); ++i) {
      if (std::find(drop.begin(), drop.end(), i) == drop.end()) out.push_back(full[i]);
    }
    return out;
  };
  CHECK(build_training_prompt(sample(), PromptVariant::kCoENoHeuristic, tok).segments ==
        without({1, 8}));
  CHECK(build_training_prompt(sample(), PromptVariant::kCoENoHateLabel, tok).segments ==
        without({4, 5}));
  CHECK(build_training_prompt(sample(), PromptVariant::kCoENoTarget, tok).segments ==
        without({6, 7}));
}

TEST_CASE("hate answer option") {
  PromptOptions o;
  o.hate_answer = "No";
  const auto s = build_training_prompt(sample(), PromptVariant::kCoEFull, SpecialTokens{}, o).render();
  CHECK(s.find("Is the text hateful? No<|sep|>") != std::string::npos);
}

TEST_CASE("variant names round trip") {
  for (PromptVariant v : kAllVariants) CHECK(parse_variant(variant_name(v)) == v);
  CHECK_FALSE(parse_variant("coe").has_value());
  CHECK(role_name(SegmentRole::kNleText) == "NleText");
}

TEST_CASE("missing target") {
  auto r = sample();
  r.target_group.clear();
  r.target_unknown = true;
  CHECK_THROWS_AS(build_training_prompt(r, PromptVariant::kCoEFull, SpecialTokens{}), coe::InputError);
  CHECK_THROWS_AS(build_training_prompt(r, PromptVariant::kCoENoHeuristic, SpecialTokens{}),
                  coe::InputError);
  CHECK_NOTHROW(build_training_prompt(r, PromptVariant::kCoENoTarget, SpecialTokens{}));
  CHECK_NOTHROW(build_training_prompt(r, PromptVariant::kBaseline, SpecialTokens{}));
  CHECK(requires_target(PromptVariant::kCoENoHateLabel));
  CHECK_FALSE(requires_target(PromptVariant::kBaseline));
}

TEST_CASE("field sanitization escapes token literals") {
  const SpecialTokens tok;
  CHECK(sanitize_field("  a \t b  ", tok) == "a b");
  CHECK(sanitize_field("x<|sep|>y", tok) == "x\xEF\xBC\x9C|sep|>y");  // U+FF1C
  CHECK(sanitize_field("<|endoftext|><|endoftext|>", tok).find("<|endoftext|>") == std::string::npos);

  SpecialTokens odd;
  odd.separator = "\xC2\xA7\xC2\xA7";  // non-ASCII: word joiner after the first character
  CHECK(sanitize_field("a\xC2\xA7\xC2\xA7" "b", odd) == "a\xC2\xA7\xE2\x81\xA0\xC2\xA7" "b");
  odd.separator = "\xC2\xA7";
  CHECK(sanitize_field("a\xC2\xA7" "b", odd) == "a\xEF\xBF\xBD" "b");

  CHECK(sanitize_nle("It is hateful because: x", tok) == "It is hateful because\xEF\xBC\x9A x");
}

TEST_CASE("hostile fields still parse back to the sanitized explanation") {
  auto r = sample();
  r.text = "It is hateful because: <|sep|> tricky <|endoftext|>";
  r.implied_statement = "a <|sep|> b It is hateful because: c <|endoftext|> d";
  const SpecialTokens tok;
  for (PromptVariant v : kAllVariants) {
    const auto rendered = build_training_prompt(r, v, tok).render();
    const auto parsed = parse_generated(rendered, v, tok);
    REQUIRE(parsed.ok());
    CHECK(*parsed.nle == sanitize_nle(r.implied_statement, tok));
  }
}

TEST_CASE("generated output parsing") {
  const SpecialTokens tok;
  CHECK(*parse_generated("...It is hateful because:  x y <|endoftext|> junk", PromptVariant::kCoEFull,
                         tok).nle == "x y");
  CHECK(*parse_generated("a<|sep|>b<|sep|> c", PromptVariant::kBaseline, tok).nle == "c");
  const auto bad = parse_generated("no marker here", PromptVariant::kCoEFull, tok);
  CHECK_FALSE(bad.ok());
  CHECK(bad.raw == "no marker here");
}

TEST_CASE("inference prefix plus explanation reproduces the training prompt") {
  const SpecialTokens tok;
  for (PromptVariant v : kAllVariants) {
    const auto r = sample();
    const auto prefix = build_inference_prefix(r, v, tok).render();
    CHECK(prefix + sanitize_nle(r.implied_statement, tok) + tok.end ==
          build_training_prompt(r, v, tok).render());
  }
}

TEST_CASE("special token parsing and validation") {
  const auto t = SpecialTokens::parse("start=<s>,sep=<x,y>,end=</s>");
  CHECK(t.start == "<s>");
  CHECK(t.separator == "<x,y>");
  CHECK(t.end == "</s>");
  CHECK(SpecialTokens::parse("sep=##") .start == "<|startoftext|>");
  CHECK_THROWS_AS(SpecialTokens::parse("start=,sep=a,end=b"), coe::InputError);
  CHECK_THROWS_AS(SpecialTokens::parse("start=ab,sep=b,end=c"), coe::InputError);
  CHECK_THROWS_AS(SpecialTokens::parse("bogus"), coe::InputError);
}

TEST_CASE("prompt files") {
  auto a = sample();
  auto b = sample();
  b.id = "r2";
  b.target_group.clear();
  b.target_unknown = true;
  const std::vector<HateRecord> records{a, b};
  const SpecialTokens tok;

  const auto train = render_prompt_file(records, PromptVariant::kCoEFull, tok, PromptMode::kTraining);
  CHECK(train.written == 1);
  REQUIRE(train.skipped.size() == 1);
  CHECK(train.skipped[0].record_id == "r2");
  const auto lines = coe::io::split_lines(train.content);
  REQUIRE(lines.size() == 2);
  const auto header = nlohmann::json::parse(lines[0]);
  CHECK(header["variant"] == "coe-full");
  CHECK(header["mode"] == "training");
  const auto row = nlohmann::json::parse(lines[1]);
  CHECK(row["id"] == "r1");
  CHECK(row["prompt"].get<std::string>() + row["completion"].get<std::string>() ==
        build_training_prompt(a, PromptVariant::kCoEFull, tok).render());
  CHECK(row["completion"] == "immigrants are invaders<|endoftext|>");

  const auto inf = render_prompt_file(records, PromptVariant::kCoENoTarget, tok, PromptMode::kInference);
  CHECK(inf.written == 2);
  CHECK(inf.skipped.empty());
  CHECK(nlohmann::json::parse(coe::io::split_lines(inf.content)[2])["completion"] == "");
}
