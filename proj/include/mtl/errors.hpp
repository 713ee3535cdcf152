#pragma once

#include <stdexcept>
#include <string>

namespace mtl {

// Shape disagreement between operands.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input outside an operation's numeric domain (e.g. log of a non-positive).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated call contract (wrong arity, misaligned sequences, bad root).
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inconsistent model / experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Out-of-range id lookup.
struct IndexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries the line number.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite loss during optimization; message names the offending term.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mtl
