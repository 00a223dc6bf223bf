#pragma once

#include <stdexcept>
#include <string>

namespace rwde {

// Argument outside the mathematical domain of an operation (nonpositive
// shape, alpha <= beta where transience is required, ...).
class ParameterError : public std::domain_error {
 public:
  explicit ParameterError(const std::string& what) : std::domain_error(what) {}
};

// Graph does not have the structure an operation needs (not strongly
// connected, target set unreachable, no exit edge).
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Caller misuse: empty input, index out of range, malformed file.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A configured resource guard tripped (path enumeration limit, step budget).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rwde
