#pragma once

#include <stdexcept>
#include <string>

namespace zsb {

// Malformed catalog, template, config or gold file. CLI maps this to exit 2.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model output that cannot be parsed: missing blocks, bad judgment JSON,
// out-of-range scores. Invalidity at the pipeline level is data, not failure;
// stages catch this and record it.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Transient transport failure (timeout, rate limit, 5xx). Retryable.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Permanent provider rejection (auth, bad request). Never retried.
struct ProviderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cross-file referential integrity violations. CLI maps this to exit 4.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Run-level failure (generator unfit, lock contention). CLI maps this to exit 3.
struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver trouble: disconnected battle graph, non-convergence.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace zsb
