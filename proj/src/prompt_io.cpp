#include "zsb/prompt_io.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "zsb/errors.hpp"
#include "zsb/util.hpp"

namespace zsb {
namespace {

bool is_placeholder_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::set<std::string> scan_placeholders(const std::string& body,
                                        const std::string& name) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while ((pos = body.find("${", pos)) != std::string::npos) {
    const std::size_t close = body.find('}', pos + 2);
    if (close == std::string::npos) {
      throw SchemaError("template " + name + ": unterminated ${ marker");
    }
    const std::string ph = body.substr(pos + 2, close - pos - 2);
    if (ph.empty() || !std::all_of(ph.begin(), ph.end(), is_placeholder_char)) {
      throw SchemaError("template " + name + ": bad placeholder name \"" + ph +
                        "\"");
    }
    out.insert(ph);
    pos = close + 1;
  }
  return out;
}

std::string start_marker(std::string_view block) {
  return "<START OF " + std::string(block) + ">";
}

std::string end_marker(std::string_view block) {
  return "<END OF " + std::string(block) + ">";
}

// Lenient pass of judgment parsing: strip code fences, then take the
// substring from the first '{' to its balanced closing '}'.
std::optional<std::string> recover_object(std::string_view text) {
  std::string s = trim(text);
  if (starts_with(s, "```")) {
    // Drop the fence line and a trailing fence if present.
    const std::size_t nl = s.find('\n');
    if (nl != std::string::npos) s = s.substr(nl + 1);
    const std::size_t fence = s.rfind("```");
    if (fence != std::string::npos) s = s.substr(0, fence);
  }
  const std::size_t open = s.find('{');
  if (open == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return s.substr(open, i - open + 1);
    }
  }
  return std::nullopt;
}

nlohmann::json parse_judgment_object(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(trim(text), nullptr, false);
  if (j.is_object()) return j;
  const auto recovered = recover_object(text);
  if (recovered) {
    j = nlohmann::json::parse(*recovered, nullptr, false);
    if (j.is_object()) return j;
  }
  throw ParseError("judgment: no JSON object found in output");
}

}  // namespace

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "general") return TaskKind::general;
  if (s == "translation") return TaskKind::translation;
  if (s == "vision") return TaskKind::vision;
  throw SchemaError("unknown task kind \"" + s + "\"");
}

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::general: return "general";
    case TaskKind::translation: return "translation";
    case TaskKind::vision: return "vision";
  }
  return "general";
}

PromptTemplate PromptTemplate::from_string(std::string name, std::string body,
                                           TaskKind task) {
  PromptTemplate t;
  t.name = std::move(name);
  t.body = std::move(body);
  t.task = task;
  t.placeholders = scan_placeholders(t.body, t.name);
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path,
                                    TaskKind task) {
  return from_string(path.filename().string(), read_text_file(path.string()),
                     task);
}

RenderResult render_template(const PromptTemplate& tmpl,
                             const std::map<std::string, std::string>& bindings) {
  for (const auto& ph : tmpl.placeholders) {
    if (bindings.find(ph) == bindings.end()) {
      throw SchemaError("template " + tmpl.name +
                        ": missing binding for placeholder \"" + ph + "\"");
    }
  }
  RenderResult out;
  for (const auto& [key, value] : bindings) {
    if (tmpl.placeholders.find(key) == tmpl.placeholders.end()) {
      out.warnings.push_back("unused binding \"" + key + "\"");
    }
  }

  const std::string& body = tmpl.body;
  out.text.reserve(body.size());
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t open = body.find("${", pos);
    if (open == std::string::npos) {
      out.text.append(body, pos, std::string::npos);
      break;
    }
    out.text.append(body, pos, open - pos);
    const std::size_t close = body.find('}', open + 2);
    const std::string ph = body.substr(open + 2, close - open - 2);
    out.text.append(bindings.at(ph));
    pos = close + 1;
  }
  return out;
}

std::string extract_block(std::string_view text, std::string_view block_name) {
  const std::string start = start_marker(block_name);
  const std::string end = end_marker(block_name);
  const std::size_t s = text.find(start);
  if (s == std::string_view::npos) {
    throw ParseError("missing marker " + start);
  }
  const std::size_t content_begin = s + start.size();
  const std::size_t e = text.find(end, content_begin);
  if (e == std::string_view::npos) {
    throw ParseError("missing marker " + end);
  }
  return trim(text.substr(content_begin, e - content_begin));
}

bool has_block(std::string_view text, std::string_view block_name) {
  return text.find(start_marker(block_name)) != std::string_view::npos;
}

ParsedGeneration parse_generation(TaskKind task, std::string_view text) {
  ParsedGeneration out;
  out.raw = std::string(text);
  if (task == TaskKind::translation) {
    out.primary = extract_block(text, "SOURCE");
    out.reference = extract_block(text, "REFERENCE TRANSLATION");
  } else {
    out.primary = extract_block(text, "PROMPT");
    if (has_block(text, "REFERENCE")) {
      out.reference = extract_block(text, "REFERENCE");
    }
  }
  if (out.primary.empty()) {
    throw ParseError("generation: empty primary text");
  }
  return out;
}

ParsedJudgment parse_judgment(std::string_view text) {
  const nlohmann::json j = parse_judgment_object(text);
  if (!j.contains("feedback") || !j.at("feedback").is_string()) {
    throw ParseError("judgment: missing \"feedback\" text");
  }
  if (!j.contains("result")) {
    throw ParseError("judgment: missing \"result\"");
  }
  const auto& r = j.at("result");
  int score = 0;
  if (r.is_number_integer()) {
    score = r.get<int>();
  } else if (r.is_string()) {
    const std::string s = trim(r.get<std::string>());
    if (s.size() != 1 || s[0] < '0' || s[0] > '9') {
      throw ParseError("judgment: \"result\" is not a digit: \"" + s + "\"");
    }
    score = s[0] - '0';
  } else {
    throw ParseError("judgment: \"result\" must be an integer or digit-string");
  }
  if (score < 1 || score > 6) {
    throw ParseError("judgment: score " + std::to_string(score) +
                     " outside 1..6");
  }
  ParsedJudgment out;
  out.feedback = j.at("feedback").get<std::string>();
  out.score = score;
  return out;
}

std::string to_string(BattleOutcome o) {
  switch (o) {
    case BattleOutcome::a: return "A";
    case BattleOutcome::b: return "B";
    case BattleOutcome::tie: return "tie";
  }
  return "tie";
}

BattleOutcome battle_outcome_from_string(const std::string& s) {
  if (s == "A") return BattleOutcome::a;
  if (s == "B") return BattleOutcome::b;
  if (s == "tie") return BattleOutcome::tie;
  throw SchemaError("unknown battle outcome \"" + s + "\"");
}

ParsedVerdict parse_verdict(std::string_view text) {
  const nlohmann::json j = parse_judgment_object(text);
  if (!j.contains("feedback") || !j.at("feedback").is_string()) {
    throw ParseError("verdict: missing \"feedback\" text");
  }
  if (!j.contains("result") || !j.at("result").is_string()) {
    throw ParseError("verdict: missing \"result\"");
  }
  const std::string r = trim(j.at("result").get<std::string>());
  ParsedVerdict out;
  out.feedback = j.at("feedback").get<std::string>();
  if (r == "A") {
    out.outcome = BattleOutcome::a;
  } else if (r == "B") {
    out.outcome = BattleOutcome::b;
  } else if (r == "TIE") {
    out.outcome = BattleOutcome::tie;
  } else {
    throw ParseError("verdict: \"result\" must be A, B or TIE, got \"" + r +
                     "\"");
  }
  return out;
}

bool parse_consistency(std::string_view text) {
  const nlohmann::json j = parse_judgment_object(text);
  if (!j.contains("result") || !j.at("result").is_string()) {
    throw ParseError("consistency: missing \"result\"");
  }
  const std::string r = trim(j.at("result").get<std::string>());
  if (r == "consistent") return true;
  if (r == "inconsistent") return false;
  throw ParseError(
      "consistency: \"result\" must be consistent or inconsistent, got \"" + r +
      "\"");
}

}  // namespace zsb
