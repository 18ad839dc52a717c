#ifndef LAGMECH_ERRORS_HPP
#define LAGMECH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lagmech {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed expression source.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Unbound variable or out-of-domain function argument during evaluation.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Degenerate metric, singular Jacobian, dependent constraints,
// isotropic gradient: numerically singular geometric data.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Violated operation precondition (indefinite metric where positive
// definiteness is required, wrong time-form shape, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Bad system definition file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lagmech

#endif
