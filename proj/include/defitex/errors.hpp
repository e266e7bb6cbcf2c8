#pragma once

#include <stdexcept>
#include <string>

namespace defitex {

// Error categories map onto the CLI exit codes: IoError -> 2,
// SchemaError -> 4, IdMismatchError -> 5.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct IdMismatchError : std::runtime_error {
  explicit IdMismatchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace defitex
