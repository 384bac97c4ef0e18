#pragma once

#include <stdexcept>
#include <string>

namespace wlt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class InsufficientSamples : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class UnsupportedScenario : public Error {
public:
  using Error::Error;
};

/// The variance estimate came out nonpositive. The raw value is kept so that
/// callers can report it; it is never clamped.
class DegenerateVariance : public Error {
public:
  explicit DegenerateVariance(double raw)
      : Error("degenerate variance estimate: sigma_hat^2 = " + std::to_string(raw)), raw_(raw) {}
  double raw() const noexcept { return raw_; }

private:
  double raw_;
};

/// Every replication of a simulation cell failed.
class AllReplicationsFailed : public Error {
public:
  using Error::Error;
};

/// Malformed input data (CSV contents, weight files).
class DataError : public Error {
public:
  using Error::Error;
};

/// Configuration file error; `line` is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
public:
  ConfigError(const std::string& msg, int line, const std::string& source = {})
      : Error(format(msg, line, source)), message_(msg), line_(line) {}
  int line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

private:
  static std::string format(const std::string& msg, int line, const std::string& source) {
    std::string out = source.empty() ? std::string() : source + ": ";
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    return out + msg;
  }
  std::string message_;
  int line_;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace wlt
