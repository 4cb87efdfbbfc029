#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace statcurv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A partial function (log, sqrt, division, negative power) was evaluated
/// outside its domain. `subexpression` names the offending node.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::string subexpression)
      : Error(message + " in `" + subexpression + "`"), subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// A manifold spec or transform parameter set is inconsistent.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorisation of the metric failed.
class NonSpdMetric : public Error {
 public:
  using Error::Error;
};

/// The requested formula is not defined in this dimension.
class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

}  // namespace statcurv
