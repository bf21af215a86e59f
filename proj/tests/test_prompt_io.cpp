#include <map>

#include "doctest.h"
#include "support.hpp"
#include "zsb/errors.hpp"
#include "zsb/prompt_io.hpp"
#include "zsb/rng.hpp"

using namespace zsb;

namespace {

PromptTemplate tmpl(const std::string& body) {
  return PromptTemplate::from_string("test", body);
}

// Well-formed judgment variants: whitespace, fences, prose padding, integer
// and string results. Deterministic by index.
std::string wellformed_variant(int i, int score) {
  nlohmann::json j;
  j["feedback"] = "assessment " + std::to_string(i) + " with \"quotes\"";
  j["result"] = (i % 2 == 0) ? nlohmann::json(score)
                             : nlohmann::json(std::to_string(score));
  std::string body = j.dump(i % 3 == 0 ? -1 : 2);
  switch (i % 5) {
    case 0: return body;
    case 1: return "\n\n   " + body + "   \n";
    case 2: return "```json\n" + body + "\n```";
    case 3: return "```\n" + body + "\n```\n";
    default:
      return "Sure! Here is my evaluation.\n" + body + "\nHope that helps.";
  }
}

std::string malformed_variant(int i) {
  switch (i % 10) {
    case 0: return "The answer was quite good, maybe a 5 out of 6.";
    case 1: return "{\"feedback\": \"ok\"}";
    case 2: return "{\"feedback\": \"ok\", \"result\": \"7\"}";
    case 3: return "{\"feedback\": \"ok\", \"result\": 0}";
    case 4: return "{\"feedback\": \"ok\", \"result\": \"five\"}";
    case 5: return "{\"feedback\": \"ok\", \"result\": 3.5}";
    case 6: return "{\"feedback\": \"truncated\", \"result\":";
    case 7: return "";
    case 8: return "{\"result_like\": 4, \"feedback\": \"missing key\"}";
    default: return "result: 4 (not JSON at all)";
  }
}

}  // namespace

TEST_CASE("render substitutes bindings literally") {
  const auto r = render_template(tmpl("Topic: ${topic}"),
                                 {{"topic", "space exploration"}});
  CHECK(r.text == "Topic: space exploration");
  CHECK(r.warnings.empty());
}

TEST_CASE("render reports the missing placeholder by name") {
  CHECK_THROWS_WITH_AS(render_template(tmpl("Topic: ${topic}"), {}),
                       doctest::Contains("topic"), SchemaError);
}

TEST_CASE("extra bindings are accepted with a warning") {
  const auto r = render_template(tmpl("Hi"), {{"unused", "x"}});
  CHECK(r.text == "Hi");
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("unused") != std::string::npos);
}

TEST_CASE("no recursive expansion of substituted values") {
  const auto r = render_template(tmpl("A=${a} B=${b}"),
                                 {{"a", "${b}"}, {"b", "2"}});
  CHECK(r.text == "A=${b} B=2");
}

TEST_CASE("shipped meta prompt renders with a full assignment") {
  const PromptTemplate meta = PromptTemplate::load(
      testsupport::assets_dir() + "/prompts/meta_general.txt");
  const std::map<std::string, std::string> bindings = {
      {"language", "English"},
      {"topic", "Space exploration"},
      {"subtopic", "Satellite systems"},
      {"difficulty", "Hard"},
      {"style", "Analytical"},
      {"writer", "Educators"},
      {"writing_proficiency", "High"},
      {"length", "Medium"},
  };
  CHECK(meta.placeholders.size() == 8);
  const auto r = render_template(meta, bindings);
  CHECK(r.text.find("${") == std::string::npos);
  for (const auto& [key, value] : bindings) {
    CHECK(r.text.find(value) != std::string::npos);
  }
}

TEST_CASE("render length bookkeeping is exact") {
  SplitRng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::string body = "start ";
    std::map<std::string, std::string> bindings;
    std::size_t marker_len = 0, binding_len = 0;
    for (int p = 0; p < 4; ++p) {
      const std::string name = "p" + std::to_string(p);
      const std::string value(rng.below(20), 'x');
      body += "${" + name + "} mid";
      bindings[name] = value;
      marker_len += name.size() + 3;
      binding_len += value.size();
    }
    const auto r = render_template(PromptTemplate::from_string("t", body),
                                   bindings);
    CHECK(r.text.size() == body.size() - marker_len + binding_len);
  }
}

TEST_CASE("extract block basics") {
  CHECK(extract_block("<START OF PROMPT>\nHello\n<END OF PROMPT>", "PROMPT") ==
        "Hello");
  CHECK_THROWS_WITH_AS(extract_block("<START OF PROMPT>\nHello", "PROMPT"),
                       doctest::Contains("<END OF PROMPT>"), ParseError);
  CHECK_THROWS_WITH_AS(extract_block("no markers here", "PROMPT"),
                       doctest::Contains("<START OF PROMPT>"), ParseError);
}

TEST_CASE("repeated markers: first start, first end after it") {
  const std::string text =
      "<START OF PROMPT>one<END OF PROMPT>\n"
      "<START OF PROMPT>two<END OF PROMPT>";
  CHECK(extract_block(text, "PROMPT") == "one");
}

TEST_CASE("markers indented or padded with spaces still match") {
  const std::string text = "   <START OF PROMPT>   \n  body  \n  <END OF PROMPT>  ";
  CHECK(extract_block(text, "PROMPT") == "body");
}

TEST_CASE("block round trip over marker-free content") {
  SplitRng rng(7);
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyz ABCDEFGHIJKLMNOPQRSTUVWXYZ\n0123456789.,;:!?";
  for (int trial = 0; trial < 200; ++trial) {
    std::string content;
    const std::size_t len = 1 + rng.below(120);
    for (std::size_t i = 0; i < len; ++i) {
      content.push_back(alphabet[rng.below(alphabet.size())]);
    }
    const std::string wrapped =
        "<START OF BLOCK>\n" + content + "\n<END OF BLOCK>";
    // extract trims, so compare against the trimmed content
    std::string expected = content;
    while (!expected.empty() && std::isspace((unsigned char)expected.front()))
      expected.erase(expected.begin());
    while (!expected.empty() && std::isspace((unsigned char)expected.back()))
      expected.pop_back();
    CHECK(extract_block(wrapped, "BLOCK") == expected);
  }
}

TEST_CASE("parse_generation for general output") {
  const std::string both =
      "<START OF PROMPT>\nQ?\n<END OF PROMPT>\n"
      "<START OF REFERENCE>\nA.\n<END OF REFERENCE>";
  const auto g = parse_generation(TaskKind::general, both);
  CHECK(g.primary == "Q?");
  REQUIRE(g.reference.has_value());
  CHECK(*g.reference == "A.");

  const auto only = parse_generation(TaskKind::general,
                                     "<START OF PROMPT>Q?<END OF PROMPT>");
  CHECK(only.primary == "Q?");
  CHECK_FALSE(only.reference.has_value());
}

TEST_CASE("translation output requires source and reference translation") {
  const std::string ok =
      "<START OF SOURCE>\nsrc\n<END OF SOURCE>\n"
      "<START OF REFERENCE TRANSLATION>\nref\n<END OF REFERENCE TRANSLATION>";
  const auto g = parse_generation(TaskKind::translation, ok);
  CHECK(g.primary == "src");
  CHECK(*g.reference == "ref");

  CHECK_THROWS_AS(parse_generation(TaskKind::translation,
                                   "<START OF SOURCE>src<END OF SOURCE>"),
                  ParseError);
}

TEST_CASE("empty primary text is a parse error") {
  CHECK_THROWS_AS(parse_generation(TaskKind::general,
                                   "<START OF PROMPT>  \n <END OF PROMPT>"),
                  ParseError);
}

TEST_CASE("parse_judgment accepts digit strings and integers") {
  auto j = parse_judgment(R"({"feedback": "clear and accurate", "result": "5"})");
  CHECK(j.score == 5);
  CHECK(j.feedback == "clear and accurate");
  j = parse_judgment(R"({"feedback": "ok", "result": 4})");
  CHECK(j.score == 4);
  j = parse_judgment(R"({"feedback": "ok", "result": " 6 "})");
  CHECK(j.score == 6);
}

TEST_CASE("parse_judgment rejects out-of-range and never coerces") {
  CHECK_THROWS_AS(parse_judgment(R"({"feedback": "x", "result": "7"})"),
                  ParseError);
  CHECK_THROWS_AS(parse_judgment(R"({"feedback": "x", "result": 0})"),
                  ParseError);
  CHECK_THROWS_AS(parse_judgment(R"({"feedback": "x", "result": 5.5})"),
                  ParseError);
}

TEST_CASE("parse_judgment strips fences and surrounding prose") {
  CHECK(parse_judgment("```json\n{\"feedback\": \"f\", \"result\": 3}\n```")
            .score == 3);
  CHECK(parse_judgment(
            "Here you go:\n{\"feedback\": \"f\", \"result\": \"2\"}\nCheers")
            .score == 2);
}

TEST_CASE("well-formed judgment corpus parses fully") {
  SplitRng rng(2024);
  int ok = 0;
  const int total = 200;
  for (int i = 0; i < total; ++i) {
    const int score = 1 + static_cast<int>(rng.below(6));
    try {
      const auto j = parse_judgment(wellformed_variant(i, score));
      CHECK(j.score == score);
      ++ok;
    } catch (const ParseError&) {
    }
  }
  // acceptance threshold is 95%; the corpus is designed to parse fully
  CHECK(ok == total);
}

TEST_CASE("malformed judgment corpus is rejected fully") {
  const int total = 100;
  for (int i = 0; i < total; ++i) {
    CHECK_THROWS_AS(parse_judgment(malformed_variant(i)), ParseError);
  }
}

TEST_CASE("parse_verdict handles the three outcomes") {
  CHECK(parse_verdict(R"({"feedback": "f", "result": "A"})").outcome ==
        BattleOutcome::a);
  CHECK(parse_verdict(R"({"feedback": "f", "result": "B"})").outcome ==
        BattleOutcome::b);
  CHECK(parse_verdict(R"({"feedback": "f", "result": "TIE"})").outcome ==
        BattleOutcome::tie);
  CHECK_THROWS_AS(parse_verdict(R"({"feedback": "f", "result": "C"})"),
                  ParseError);
}

TEST_CASE("parse_consistency verdicts") {
  CHECK(parse_consistency(R"({"feedback": "f", "result": "consistent"})"));
  CHECK_FALSE(
      parse_consistency(R"({"feedback": "f", "result": "inconsistent"})"));
  CHECK_THROWS_AS(parse_consistency(R"({"feedback": "f", "result": "maybe"})"),
                  ParseError);
}

TEST_CASE("shipped judge templates carry the expected placeholders") {
  const std::string assets = testsupport::assets_dir();
  const auto judge =
      PromptTemplate::load(assets + "/prompts/judge_general.txt");
  CHECK(judge.placeholders ==
        std::set<std::string>{"prompt", "answer"});
  const auto judge_ref = PromptTemplate::load(
      assets + "/prompts/judge_general_with_reference.txt");
  CHECK(judge_ref.placeholders ==
        std::set<std::string>{"prompt", "answer", "reference"});
  const auto pairwise =
      PromptTemplate::load(assets + "/prompts/judge_pairwise.txt");
  CHECK(pairwise.placeholders ==
        std::set<std::string>{"prompt", "answer_a", "answer_b"});
  const auto meta_translation =
      PromptTemplate::load(assets + "/prompts/meta_translation.txt");
  CHECK(meta_translation.placeholders ==
        std::set<std::string>{"source_language", "target_language", "topic",
                              "subtopic", "source_length", "style"});
  const auto meta_vision =
      PromptTemplate::load(assets + "/prompts/meta_vision.txt");
  CHECK(meta_vision.placeholders.empty());
  const auto safety = PromptTemplate::load(assets + "/prompts/safety_text.txt");
  CHECK(safety.placeholders == std::set<std::string>{"prompt"});
}
