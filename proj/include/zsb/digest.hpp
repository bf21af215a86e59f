#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace zsb {

// SHA-256 hex digest of a byte string.
std::string sha256_hex(std::string_view data);

// Digest of a file's contents. Throws SchemaError if unreadable.
std::string sha256_file(const std::filesystem::path& p);

// Stable 64-bit hash for derived mock randomness (FNV-1a).
std::uint64_t fnv1a64(std::string_view data);

}  // namespace zsb
