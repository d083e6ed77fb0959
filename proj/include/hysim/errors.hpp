#pragma once

#include <stdexcept>
#include <string>

namespace hysim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Externality family parameters outside their admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Interpolation grid not strictly increasing, not covering [0,1], or
// mismatched with its value array.
class GridError : public Error {
 public:
  using Error::Error;
};

// A tabulated f or g violates the monotonicity/curvature assumptions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// R_L <= S_A at the evaluated shares; thresholds are undefined.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class DistributionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hysim
