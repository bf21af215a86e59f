#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace zsb {

enum class TaskKind { general, translation, vision };

TaskKind task_kind_from_string(const std::string& s);
std::string to_string(TaskKind k);

// Text with ${name} markers. The required-placeholder set is exactly the set
// of markers in the body.
struct PromptTemplate {
  std::string name;
  std::string body;
  std::set<std::string> placeholders;
  TaskKind task = TaskKind::general;

  static PromptTemplate from_string(std::string name, std::string body,
                                    TaskKind task = TaskKind::general);
  static PromptTemplate load(const std::filesystem::path& path,
                             TaskKind task = TaskKind::general);
};

struct RenderResult {
  std::string text;
  std::vector<std::string> warnings;  // e.g. unused bindings
};

// Single-pass literal substitution; values are never re-expanded. Missing
// bindings raise SchemaError naming the placeholder; extra bindings are
// accepted with a warning record.
RenderResult render_template(const PromptTemplate& tmpl,
                             const std::map<std::string, std::string>& bindings);

// Content between <START OF NAME> and <END OF NAME>, trimmed. If markers
// repeat, the first START and the first END after it win. Matching is
// case-sensitive; whitespace around markers belongs to the content and is
// trimmed away.
std::string extract_block(std::string_view text, std::string_view block_name);
bool has_block(std::string_view text, std::string_view block_name);

struct ParsedGeneration {
  std::string primary;                   // prompt, or source for translation
  std::optional<std::string> reference;  // required for translation
  std::string raw;
};

ParsedGeneration parse_generation(TaskKind task, std::string_view text);

struct ParsedJudgment {
  std::string feedback;
  int score = 0;  // always in [1, 6] when returned
};

// Accepts {"feedback": <text>, "result": <integer or digit-string 1..6>}.
// One lenient pass strips code fences and surrounding prose before the
// outermost object; anything else is a ParseError. Scores are never coerced.
ParsedJudgment parse_judgment(std::string_view text);

enum class BattleOutcome { a, b, tie };

std::string to_string(BattleOutcome o);
BattleOutcome battle_outcome_from_string(const std::string& s);

struct ParsedVerdict {
  std::string feedback;
  BattleOutcome outcome = BattleOutcome::tie;
};

// Pairwise variant of parse_judgment: result must be "A", "B" or "TIE".
ParsedVerdict parse_verdict(std::string_view text);

// "consistent" / "inconsistent" verdicts from the attribute check.
bool parse_consistency(std::string_view text);

}  // namespace zsb
