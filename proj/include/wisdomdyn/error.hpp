#pragma once

#include <stdexcept>
#include <string>

namespace wisdomdyn {

// Base for every error raised by the library. The CLI maps these onto exit
// codes, so each concrete failure gets its own type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonPositiveInput : public Error {
 public:
  using Error::Error;
};

class NotStronglyConnected : public Error {
 public:
  using Error::Error;
};

class ZeroRow : public Error {
 public:
  using Error::Error;
};

class IsolatedAgent : public Error {
 public:
  using Error::Error;
};

class MissingSelfLoop : public Error {
 public:
  using Error::Error;
};

class HullViolation : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  using Error::Error;
};

class MaxStepsExceeded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wisdomdyn
