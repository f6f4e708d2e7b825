#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace popdyn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operation applied to a state in the wrong units (natural vs transformed).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// The stepping matrix (1/tau) I - theta A could not be factorized.
class FactorizationFailed : public Error {
 public:
  FactorizationFailed(const std::string& what, double tau, double theta)
      : Error(what), tau_(tau), theta_(theta) {}
  double tau() const { return tau_; }
  double theta() const { return theta_; }

 private:
  double tau_;
  double theta_;
};

/// Malformed input file; row is 1-based and counts the header line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t row, const std::string& msg)
      : Error(path + ":" + std::to_string(row) + ": " + msg), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A check whose preconditions do not hold (e.g. decay condition not met).
class NotApplicable : public Error {
 public:
  using Error::Error;
};

}  // namespace popdyn
