#pragma once

#include <stdexcept>
#include <string>

namespace ecx {

/// Bad or unusable input: malformed files, out-of-range arguments,
/// insufficient data overlap. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degeneracy discovered while computing on otherwise valid input:
/// zero variance, collinear regressors, nothing to iterate.
/// Maps to CLI exit code 3.
class ComputationError : public std::runtime_error {
 public:
  explicit ComputationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ecx
