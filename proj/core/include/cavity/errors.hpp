#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cavity {

/// Shape or index-range problem in input data.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input that violates a stated symmetry or consistency requirement.
struct DataCorruptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative solver failed; carries the residual history.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history(std::move(history)) {}
  std::vector<double> history;
};

/// Bad user configuration (CLI options, scheme selector, ...).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cavity
