#pragma once

#include <stdexcept>
#include <string>

namespace mpmd {

// Malformed user input: bad file, bad parameter, violated precondition.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Instance is too large for an exact solver; caller should switch modes.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent internal state (a bug, not a user mistake).
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace mpmd
