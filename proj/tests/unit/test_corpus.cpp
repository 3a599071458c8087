#include <doctest.h>

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "coe/corpus.hpp"
#include "coe/error.hpp"
#include "coe/io.hpp"

using namespace coe::corpus;

namespace {

std::vector<HateRecord> make_records(std::size_t n, std::size_t categories = 1) {
  std::vector<HateRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    HateRecord r;
    r.id = fmt::format("r{}", i);
    r.text = "post";
    r.target_group = "group";
    r.implied_statement = "statement";
    r.category = fmt::format("c{}", i % categories);
    out.push_back(r);
  }
  return out;
}

std::vector<std::string> ids(const std::vector<HateRecord>& part) {
  std::vector<std::string> out;
  for (const auto& r : part) out.push_back(r.id);
  return out;
}

}  // namespace

TEST_CASE("parse a well-formed record") {
  const auto res = parse_corpus(
      R"({"id": 7, "post": "some text", "class": "implicit_hate", "target": "immigrants", "implied_statement": "they are bad", "implicit_class": "stereotypical"})"
      "\n");
  REQUIRE(res.records.size() == 1);
  const auto& r = res.records[0];
  CHECK(r.id == "7");
  CHECK(r.text == "some text");
  CHECK(r.hate_label);
  CHECK(r.target_group == "immigrants");
  CHECK_FALSE(r.target_unknown);
  CHECK(r.implied_statement == "they are bad");
  CHECK(r.category == "stereotypical");
  CHECK(res.line_count == 1);
}

TEST_CASE("record-level problems become rejections with reasons") {
  const std::string content =
      "{\"id\":\"a\",\"post\":\"t\",\"target\":\"g\",\"implied_statement\":\"s\"}\n"
      "not json\n"
      "\n"
      "[1,2]\n"
      "{\"id\":\"b\",\"target\":\"g\",\"implied_statement\":\"s\"}\n"
      "{\"id\":\"c\",\"post\":\"  \",\"target\":\"g\",\"implied_statement\":\"s\"}\n"
      "{\"id\":\"d\",\"post\":\"t\",\"target\":3,\"implied_statement\":\"s\"}\n"
      "{\"id\":\"a\",\"post\":\"t\",\"target\":\"g\",\"implied_statement\":\"s\"}\n"
      "{\"id\":\"e\",\"post\":\"t\",\"implied_statement\":\"s\"}\n"
      "{\"id\":\"f\",\"post\":\"t\",\"target\":null,\"implied_statement\":\"s\"}\n"
      "{\"post\":\"t\",\"target\":\"g\",\"implied_statement\":\"s\"}\n";
  const auto res = parse_corpus(content);
  CHECK(res.line_count == 11);
  CHECK(res.records.size() + res.rejections.size() == res.line_count);
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[1].id == "f");
  CHECK(res.records[1].target_unknown);
  CHECK(res.records[1].target_group.empty());

  std::vector<std::pair<std::size_t, std::string>> got;
  for (const auto& r : res.rejections) got.emplace_back(r.line, r.reason);
  const std::vector<std::pair<std::size_t, std::string>> want{
      {2, "malformed JSON"},
      {3, "blank line"},
      {4, "line is not a JSON object"},
      {5, "missing field: text"},
      {6, "empty field: text"},
      {7, "invalid field type: target_group"},
      {8, "duplicate id: a"},
      {9, "missing field: target_group"},
      {11, "missing field: id"},
  };
  CHECK(got == want);
  CHECK(rejections_to_jsonl(res.rejections).starts_with("{\"line\":2,\"reason\":\"malformed JSON\"}\n"));
}

TEST_CASE("hate label values") {
  auto label = [](const char* v) {
    const auto res = parse_corpus(fmt::format(
        R"({{"id":"a","post":"t","target":"g","implied_statement":"s","class":{}}})", v));
    REQUIRE(res.records.size() == 1);
    return res.records[0].hate_label;
  };
  CHECK(label("\"implicit_hate\""));
  CHECK_FALSE(label("\"not_hate\""));
  CHECK_FALSE(label("false"));
  CHECK(label("true"));
  CHECK(parse_corpus(R"({"id":"a","post":"t","target":"g","implied_statement":"s","class":[1]})")
            .rejections.at(0)
            .reason == "invalid field type: hate_label");
}

TEST_CASE("target_unknown flag allows an empty target") {
  const auto res = parse_corpus(
      R"({"id":"a","post":"t","target":"","target_unknown":true,"implied_statement":"s"})"
      "\n"
      R"({"id":"b","post":"t","target":"","implied_statement":"s"})");
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].target_unknown);
  CHECK(res.rejections.at(0).reason == "empty field: target_group");
}

TEST_CASE("schema overrides") {
  const auto schema = SchemaMap::parse("text=tweet, target_group=group");
  CHECK(schema.text == "tweet");
  CHECK(schema.target_group == "group");
  CHECK(schema.id == "id");
  const auto res = parse_corpus(
      R"({"id":"a","tweet":"t","group":"g","implied_statement":"s"})", schema);
  CHECK(res.records.size() == 1);
  CHECK_THROWS_AS(SchemaMap::parse("bogus=x"), coe::InputError);
  CHECK_THROWS_AS(SchemaMap::parse("text"), coe::InputError);
  CHECK_THROWS_AS(SchemaMap::parse("text="), coe::InputError);
}

TEST_CASE("load_corpus reports unreadable files") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), coe::IoError);
}

// Frozen from an independent Python port of the generator.
TEST_CASE("splitmix64 reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(rng.next() == 0x06c45d188009454fULL);
}

TEST_CASE("seeded permutations") {
  CHECK(seeded_permutation(10, 42) == std::vector<std::size_t>{8, 3, 6, 5, 4, 0, 9, 2, 1, 7});
  CHECK(seeded_permutation(8, 7) == std::vector<std::size_t>{7, 4, 6, 1, 2, 5, 0, 3});
  CHECK(seeded_permutation(0, 1).empty());
  CHECK(seeded_permutation(1, 1) == std::vector<std::size_t>{0});
  auto p = seeded_permutation(1000, 99);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == i);
}

TEST_CASE("below stays in bounds") {
  SplitMix64 rng(5);
  for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 7ULL, 1000ULL, (1ULL << 63) + 1}) {
    for (int i = 0; i < 200; ++i) CHECK(rng.below(bound) < bound);
  }
}

TEST_CASE("split sizes") {
  struct Case {
    std::size_t n, train, validation, test;
  };
  for (const Case c : {Case{6358, 4770, 794, 794}, Case{40, 30, 5, 5}, Case{8, 6, 1, 1},
                       Case{1, 1, 0, 0}, Case{7, 7, 0, 0}}) {
    const auto records = make_records(c.n);
    const auto s = split_corpus(records, {}, 42);
    CHECK(s.train.size() == c.train);
    CHECK(s.validation.size() == c.validation);
    CHECK(s.test.size() == c.test);
  }
  const auto records = make_records(10);
  const auto s = split_corpus(records, {0.7, 0.2, 0.1}, 1);
  CHECK(s.validation.size() == 2);
  CHECK(s.test.size() == 1);
  CHECK(s.train.size() == 7);
}

TEST_CASE("split assignment follows the permutation") {
  const auto records = make_records(8);
  const auto s = split_corpus(records, {}, 7);
  CHECK(ids(s.train) == std::vector<std::string>{"r7", "r4", "r6", "r1", "r2", "r5"});
  CHECK(ids(s.validation) == std::vector<std::string>{"r0"});
  CHECK(ids(s.test) == std::vector<std::string>{"r3"});
}

TEST_CASE("split is deterministic, disjoint and covering") {
  const auto records = make_records(500);
  const auto a = split_corpus(records, {}, 123);
  const auto b = split_corpus(records, {}, 123);
  const auto c = split_corpus(records, {}, 124);
  CHECK(a.manifest().dump() == b.manifest().dump());
  CHECK(a.manifest().dump() != c.manifest().dump());
  std::set<std::string> all;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    for (const auto& r : *part) CHECK(all.insert(r.id).second);
  }
  CHECK(all.size() == 500);
  const auto m = a.manifest();
  CHECK(m["seed"] == 123);
  CHECK(m["train"].size() == a.train.size());
}

TEST_CASE("stratified split allocates per category") {
  const auto records = make_records(80, 2);  // 40 per category
  const auto s = split_corpus(records, {}, 42, true);
  CHECK(s.train.size() == 60);
  CHECK(s.validation.size() == 10);
  CHECK(s.test.size() == 10);
  auto count = [](const std::vector<HateRecord>& part, const char* cat) {
    return std::count_if(part.begin(), part.end(), [&](const auto& r) { return r.category == cat; });
  };
  CHECK(count(s.validation, "c0") == 5);
  CHECK(count(s.test, "c1") == 5);
}

TEST_CASE("invalid split input") {
  const auto records = make_records(10);
  CHECK_THROWS_AS(split_corpus(records, {0.5, 0.5, 0.5}, 1), coe::InputError);
  CHECK_THROWS_AS(split_corpus(records, {1.0, 0.0, 0.0}, 1), coe::InputError);
  CHECK_THROWS_AS(split_corpus(records, {1.2, -0.1, -0.1}, 1), coe::InputError);
  CHECK_THROWS_AS(split_corpus(std::span<const HateRecord>{}, {}, 1), coe::InputError);
}
