#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"

namespace zsb {

// One JSON object per line. Missing file reads as empty. Blank lines skipped.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& p);

// Appends a single record (flushed line-by-line for crash-safe progress).
void append_jsonl(const std::filesystem::path& p, const nlohmann::json& record);

// Rewrites the whole file atomically (temp + rename) in the given order.
// Objects serialize with sorted keys, so output bytes are deterministic.
void write_jsonl_atomic(const std::filesystem::path& p,
                        const std::vector<nlohmann::json>& records);

}  // namespace zsb
