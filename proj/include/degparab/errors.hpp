#pragma once

#include <stdexcept>
#include <string>

namespace degparab {

// Invalid parameters or preconditions (bad config, geometry outside the
// field domain, scale factors that do not map nodes to nodes, ...).
// The CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at runtime (eigensolver non-convergence, non-finite
// values, CFL collapse). The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// CFL refusal carries the admissible step so callers can adapt.
class CflError : public NumericError {
public:
  CflError(const std::string& msg, double admissible)
      : NumericError(msg), admissible_dt(admissible) {}
  double admissible_dt;
};

}  // namespace degparab
