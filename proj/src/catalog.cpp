#include "zsb/catalog.hpp"

#include <algorithm>
#include <fstream>

#include "zsb/errors.hpp"

namespace zsb {
namespace {

// Keys of the catalog document that are not attribute axes.
bool is_reserved_key(const std::string& key) {
  return key == "topics" || key == "name" || key == "task" ||
         key == "languages" || key == "language_pairs" ||
         key == "schema_version";
}

std::vector<std::string> parse_string_list(const nlohmann::json& j,
                                           const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError("catalog: " + what + " must be a non-empty list");
  }
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_string() || v.get<std::string>().empty()) {
      throw SchemaError("catalog: " + what + " entries must be non-empty strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

void require_distinct(const std::vector<std::string>& values,
                      const std::string& what) {
  std::set<std::string> seen;
  for (const auto& v : values) {
    if (!seen.insert(v).second) {
      throw SchemaError("catalog: duplicate value \"" + v + "\" in " + what);
    }
  }
}

}  // namespace

std::uint64_t AttributeCatalog::pair_count() const {
  std::uint64_t n = 0;
  for (const auto& t : topics) n += t.subtopics.size();
  return n;
}

std::uint64_t AttributeCatalog::combination_count() const {
  std::uint64_t n = pair_count();
  for (const auto& [name_, values] : axes) n *= values.size();
  return n;
}

const std::vector<std::string>* AttributeCatalog::find_axis(
    const std::string& axis) const {
  for (const auto& [name_, values] : axes) {
    if (name_ == axis) return &values;
  }
  return nullptr;
}

std::set<std::string> AttributeCatalog::axis_names() const {
  std::set<std::string> out;
  for (const auto& [name_, values] : axes) out.insert(name_);
  return out;
}

std::map<std::string, std::string> AttributeAssignment::bindings() const {
  std::map<std::string, std::string> out;
  out["topic"] = topic;
  out["subtopic"] = subtopic;
  for (const auto& [axis, value] : values) out[axis] = value;
  return out;
}

nlohmann::json AttributeAssignment::to_json() const {
  nlohmann::json j;
  for (const auto& [k, v] : bindings()) j[k] = v;
  return j;
}

AttributeAssignment AttributeAssignment::from_json(const nlohmann::json& j,
                                                   const std::string& task) {
  AttributeAssignment a;
  a.task = task;
  for (const auto& [k, v] : j.items()) {
    if (k == "topic") {
      a.topic = v.get<std::string>();
    } else if (k == "subtopic") {
      a.subtopic = v.get<std::string>();
    } else {
      a.values.emplace_back(k, v.get<std::string>());
    }
  }
  return a;
}

AttributeCatalog parse_catalog(const nlohmann::json& doc,
                               const std::string& source_name) {
  if (!doc.is_object()) {
    throw SchemaError("catalog " + source_name + ": document must be an object");
  }
  AttributeCatalog cat;
  cat.name = doc.value("name", source_name);
  cat.task = doc.value("task", "general");

  if (!doc.contains("topics")) {
    throw SchemaError("catalog " + source_name + ": missing key \"topics\"");
  }
  const auto& topics = doc.at("topics");
  if (!topics.is_array() || topics.empty()) {
    throw SchemaError("catalog " + source_name + ": \"topics\" must be a non-empty list");
  }
  std::set<std::string> topic_names;
  for (const auto& tj : topics) {
    if (!tj.is_object() || !tj.contains("name") || !tj.contains("subtopics")) {
      throw SchemaError("catalog " + source_name +
                        ": every topic needs \"name\" and \"subtopics\"");
    }
    Topic t;
    t.name = tj.at("name").get<std::string>();
    if (t.name.empty()) {
      throw SchemaError("catalog " + source_name + ": empty topic name");
    }
    if (!topic_names.insert(t.name).second) {
      throw SchemaError("catalog " + source_name + ": duplicate topic \"" +
                        t.name + "\"");
    }
    t.subtopics = parse_string_list(tj.at("subtopics"),
                                    "subtopics of \"" + t.name + "\"");
    require_distinct(t.subtopics, "subtopics of \"" + t.name + "\"");
    cat.topics.push_back(std::move(t));
  }

  if (doc.contains("languages")) {
    cat.languages = parse_string_list(doc.at("languages"), "languages");
  } else if (doc.contains("language_pairs")) {
    cat.languages = parse_string_list(doc.at("language_pairs"), "language_pairs");
  }

  // nlohmann objects iterate in sorted key order, which fixes the axis order.
  for (const auto& [key, value] : doc.items()) {
    if (is_reserved_key(key)) continue;
    auto values = parse_string_list(value, "axis \"" + key + "\"");
    require_distinct(values, "axis \"" + key + "\"");
    cat.axes.emplace_back(key, std::move(values));
  }
  return cat;
}

AttributeCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("catalog: cannot open " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw SchemaError("catalog: invalid JSON in " + path.string());
  }
  return parse_catalog(doc, path.filename().string());
}

AttributeAssignment sample_assignment(const AttributeCatalog& catalog,
                                      SplitRng& rng) {
  AttributeAssignment a;
  a.task = catalog.task;

  // Uniform over flattened (topic, subtopic) pairs, not topic-then-subtopic.
  const std::uint64_t pairs = catalog.pair_count();
  std::uint64_t pick = rng.below(static_cast<std::size_t>(pairs));
  for (const auto& t : catalog.topics) {
    if (pick < t.subtopics.size()) {
      a.topic = t.name;
      a.subtopic = t.subtopics[static_cast<std::size_t>(pick)];
      break;
    }
    pick -= t.subtopics.size();
  }

  for (const auto& [axis, values] : catalog.axes) {
    a.values.emplace_back(axis, values[rng.below(values.size())]);
  }
  return a;
}

AttributeCatalog restrict_catalog(const AttributeCatalog& catalog,
                                  const std::set<std::string>& enabled_axes) {
  const auto known = catalog.axis_names();
  for (const auto& axis : enabled_axes) {
    if (axis != "subtopic" && known.find(axis) == known.end()) {
      throw SchemaError("restrict: unknown axis \"" + axis + "\"");
    }
  }

  AttributeCatalog out;
  out.name = catalog.name;
  out.task = catalog.task;
  out.languages = catalog.languages;

  const bool keep_subtopics = enabled_axes.count("subtopic") > 0;
  for (const auto& t : catalog.topics) {
    Topic nt;
    nt.name = t.name;
    nt.subtopics = keep_subtopics ? t.subtopics
                                  : std::vector<std::string>{kUnspecifiedValue};
    out.topics.push_back(std::move(nt));
  }
  for (const auto& [axis, values] : catalog.axes) {
    if (enabled_axes.count(axis) > 0) {
      out.axes.emplace_back(axis, values);
    } else {
      out.axes.emplace_back(axis,
                            std::vector<std::string>{kUnspecifiedValue});
    }
  }
  return out;
}

}  // namespace zsb
