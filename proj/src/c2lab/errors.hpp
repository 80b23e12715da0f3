#pragma once

#include <stdexcept>
#include <string>

namespace c2lab {

// Thrown when an operation's stated input contract is violated.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when contracting an edge whose endpoints already coincide.
struct CycleCollapseError : std::runtime_error {
  explicit CycleCollapseError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a computation would exceed its configured work budget.
struct BudgetExceededError : std::runtime_error {
  explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed input text (graph files, family specs).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a structurally well-formed input fails semantic validation.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace c2lab
