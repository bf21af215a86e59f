#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "zsb/rng.hpp"

namespace zsb {

// Placeholder value a disabled axis renders to, so templates never see an
// unbound marker.
inline constexpr const char* kUnspecifiedValue = "unspecified";

struct Topic {
  std::string name;
  std::vector<std::string> subtopics;
};

// Attribute space a benchmark samples from: a (topic, subtopic) hierarchy
// plus flat named axes. Immutable after load; safe to share across threads.
struct AttributeCatalog {
  std::string name;
  std::string task;  // "general" | "translation" | "vision"
  std::vector<Topic> topics;
  // Axes in sorted-name order; sampling draws them in this order.
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  // Supported languages or language pairs; validation metadata, never sampled.
  std::vector<std::string> languages;

  std::uint64_t pair_count() const;
  std::uint64_t combination_count() const;
  const std::vector<std::string>* find_axis(const std::string& axis) const;
  std::set<std::string> axis_names() const;
};

// One sampled point of the attribute space.
struct AttributeAssignment {
  std::string task;
  std::string topic;
  std::string subtopic;
  // Axis values in the catalog's axis order.
  std::vector<std::pair<std::string, std::string>> values;

  std::map<std::string, std::string> bindings() const;
  nlohmann::json to_json() const;
  static AttributeAssignment from_json(const nlohmann::json& j,
                                       const std::string& task);
};

// Parses and validates a catalog document. Rejects duplicate topic names,
// duplicate values within an axis or subtopic list, and empty lists; the
// error names the offending entry.
AttributeCatalog parse_catalog(const nlohmann::json& doc,
                               const std::string& source_name);
AttributeCatalog load_catalog(const std::filesystem::path& path);

// Uniform over (topic, subtopic) pairs; independently uniform over each axis.
AttributeAssignment sample_assignment(const AttributeCatalog& catalog,
                                      SplitRng& rng);

// Collapses every axis not in enabled_axes to the single "unspecified" value;
// "subtopic" in the set keeps the subtopic hierarchy, otherwise each topic
// collapses to one placeholder subtopic. Topic sampling is always on.
AttributeCatalog restrict_catalog(const AttributeCatalog& catalog,
                                  const std::set<std::string>& enabled_axes);

}  // namespace zsb
