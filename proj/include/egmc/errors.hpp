// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace egmc {

/// Parameter outside the mathematical domain of an operation (D <= 0, t < 0, r < R, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A run or experiment configuration that cannot be simulated.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arrays that must share a time grid have different lengths.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A statistic was requested on data for which it is not defined.
class StatisticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calibration could not produce an estimate (too few valid points, non-convex fits).
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

inline void require_config(bool ok, const std::string& what) {
  if (!ok) throw ConfigurationError(what);
}

}  // namespace detail
}  // namespace egmc
