#include "zsb/rng.hpp"

namespace zsb {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitRng::next() {
  state_ += kGamma;
  return mix64(state_);
}

SplitRng SplitRng::split(std::uint64_t key) const {
  return SplitRng(mix64(state_ ^ mix64(key + kGamma)));
}

std::size_t SplitRng::below(std::size_t n) {
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t span = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (~0ULL / span) * span;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= threshold);
  return static_cast<std::size_t>(x % span);
}

double SplitRng::unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

}  // namespace zsb
