#pragma once

#include <stdexcept>
#include <string>

namespace rigtk {

// Base error for all toolkit failures. exit_code() matches the CLI
// contract: 1 = usage, 2 = data/format.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const { return 2; }
};

class UsageError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 1; }
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter values (non-finite, out of domain).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Pose composition with incompatible frames.
class FrameError : public Error {
 public:
  using Error::Error;
};

// Query outside the supported range (interpolation time, line index).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Input admits no unique answer (flat signals, co-rotational samples).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Warnings go to the error stream so data outputs stay clean.
void log_warning(const std::string& message);

}  // namespace rigtk
