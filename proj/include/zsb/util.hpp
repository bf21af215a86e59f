#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace zsb {

std::string trim(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

// Fixed-point formatting with the usual round-half-away behavior of printf.
std::string format_double(double v, int decimals);

// ISO-8601 UTC timestamp from Unix seconds, e.g. "1970-01-01T00:00:42Z".
std::string iso_utc(std::int64_t epoch_seconds);

std::int64_t wall_epoch_seconds();

// Base64 without line breaks (RFC 4648 alphabet).
std::string base64_encode(std::string_view data);

// Runs fn(0..n-1) on `workers` threads. Exceptions from tasks propagate to
// the caller (first one wins). workers <= 1 degrades to a plain loop.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

std::string read_text_file(const std::string& path);
void write_text_file_atomic(const std::string& path, std::string_view content);

}  // namespace zsb
