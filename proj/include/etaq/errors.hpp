#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etaq {

/// Base class for every failure this library reports deliberately.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Index or shape outside the declared domain of an operation.
struct index_error : error {
  using error::error;
};

/// Input left the Garding cone. Carries the first failing level and its value.
struct admissibility_error : error {
  admissibility_error(const std::string& what, int level, double value)
      : error(what), failing_level(level), sigma_value(value) {}
  int failing_level;
  double sigma_value;
};

/// Right-hand side evaluated nonpositive where positivity is required.
struct positivity_error : error {
  using error::error;
};

/// Malformed text, config, or file input. offset is a byte position when known.
struct input_error : error {
  explicit input_error(const std::string& what, std::size_t at = static_cast<std::size_t>(-1))
      : error(what), offset(at) {}
  std::size_t offset;
};

/// Differential stencil requested where it is not defined.
struct stencil_error : error {
  using error::error;
};

/// Iteration budget or step floor hit before the tolerance was met.
struct nonconvergence_error : error {
  using error::error;
};

/// Operation valid in general but outside what this build implements.
struct capability_error : error {
  using error::error;
};

}  // namespace etaq
