#pragma once

#include <stdexcept>
#include <string>

namespace opsys {

/// Two vector families handed to gram_intertwiner have different Gram matrices.
class GramMismatchError : public std::invalid_argument {
 public:
  explicit GramMismatchError(const std::string& what) : std::invalid_argument(what) {}
};

/// A vector family that was required to be linearly independent is not.
class RankDeficientError : public std::invalid_argument {
 public:
  explicit RankDeficientError(const std::string& what) : std::invalid_argument(what) {}
};

/// The construction needs a matrix block of size at least two.
class NoncommutativityRequiredError : public std::invalid_argument {
 public:
  explicit NoncommutativityRequiredError(const std::string& what) : std::invalid_argument(what) {}
};

/// An operation was called outside its documented precondition.
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

/// Hyperplane separation found no strictly negative value.
class SeparationFailedError : public std::runtime_error {
 public:
  explicit SeparationFailedError(const std::string& what) : std::runtime_error(what) {}
};

/// The SDP engine could not certify either outcome.
class SolverIndeterminateError : public std::runtime_error {
 public:
  explicit SolverIndeterminateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace opsys
