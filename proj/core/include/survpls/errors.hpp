#pragma once

#include <stdexcept>
#include <string>

namespace survpls {

/// Base class for all survpls exceptions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition on the inputs was violated (empty data, dimension
/// mismatch, invalid configuration, ...).
class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what) : Error(what) {}
};

/// Thresholding removed every candidate variable at the first step, so no
/// model can be formed. Distinct from numerical failure.
class EmptyModelError : public Error {
 public:
  explicit EmptyModelError(const std::string& what) : Error(what) {}
};

/// The partial likelihood diverged (typically perfect separation) and
/// step-halving could not recover a finite value.
class MonotoneLikelihoodError : public Error {
 public:
  explicit MonotoneLikelihoodError(const std::string& what) : Error(what) {}
};

/// A requested statistic has no defined value on this input
/// (e.g. a concordance with no usable pairs).
class UndefinedResultError : public Error {
 public:
  explicit UndefinedResultError(const std::string& what) : Error(what) {}
};

}  // namespace survpls
