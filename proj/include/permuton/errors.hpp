#pragma once

#include <stdexcept>
#include <string>

namespace permuton {

/// Malformed textual input (permutations, pattern literals, model files).
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Empty, Malformed, Duplicate, OutOfRange };

  ParseError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A call whose arguments violate the operation's precondition (k > n, empty order, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exhaustive routines refuse inputs beyond their documented size limit.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A fiber was requested exactly on a piece or cell boundary, where the
/// disintegration is only defined up to a null set.
class BoundaryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace permuton
