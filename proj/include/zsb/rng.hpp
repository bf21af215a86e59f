#pragma once

#include <cstddef>
#include <cstdint>

namespace zsb {

// Deterministic splittable RNG (splitmix64 core). One stream is seeded per
// run; per-record streams are derived with split(key), so draws do not depend
// on execution order.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Independent child stream for a record key. Pure: does not advance *this.
  SplitRng split(std::uint64_t key) const;

  // Unbiased integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  // Uniform double in [0, 1).
  double unit();

 private:
  std::uint64_t state_;
};

}  // namespace zsb
