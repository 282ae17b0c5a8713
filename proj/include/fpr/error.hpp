#pragma once

#include <stdexcept>
#include <string>

namespace fpr {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument values (bad parameters, empty required inputs).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Dimension or size mismatches between related containers.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk data: bad magic, truncation, schema violations.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures, reported with the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Missing or duplicate keys in id-indexed collections.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpr
