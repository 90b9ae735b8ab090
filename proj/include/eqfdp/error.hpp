#pragma once

#include <stdexcept>
#include <string>

namespace eqfdp {

/// Invalid model or procedure parameters.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a special function.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical routine failed in a way that valid inputs should never trigger.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The threshold functional has no Hadamard derivative at G because
/// 1/alpha - G'(t*) <= 0 (tangential crossing).
class DegenerateCrossingError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// No normal limit exists for the requested correlation regime.
class RegimeError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace eqfdp
