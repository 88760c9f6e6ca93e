// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sasa {

/// Bad shapes, out-of-range indices, malformed arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition another module is responsible for was broken.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values produced or consumed by numeric routines.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedLanguage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A token span that no syntax-tree node covers.
class AlignmentError : public std::runtime_error {
 public:
  AlignmentError(std::size_t token_index, const std::string& what)
      : std::runtime_error(what), token_index_(token_index) {}

  std::size_t token_index() const noexcept { return token_index_; }

 private:
  std::size_t token_index_;
};

/// Malformed or truncated artifact file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sasa
