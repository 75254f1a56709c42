#pragma once

#include <stdexcept>
#include <string>

namespace ftkn {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A configuration value is out of range or inconsistent with another.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// NaN or Inf showed up in a forward or backward pass.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Every token of a sequence is padding; nothing to attend to.
class EmptyRegionError : public std::runtime_error {
 public:
  explicit EmptyRegionError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file or stream.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ftkn
