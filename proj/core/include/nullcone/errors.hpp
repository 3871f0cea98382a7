#pragma once

#include <stdexcept>
#include <string>

namespace nullcone {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched grids, bad sizes, malformed files: the caller handed us
/// something structurally unusable.
struct InvalidArgument : Error {
  using Error::Error;
};

/// A quantity left its mathematical domain (omega <= 0, t_hat >= 0,
/// conformal factor outside a chart bracket, degenerate horizon, ...).
struct DomainError : Error {
  using Error::Error;
};

/// The time integrator produced non-finite data away from a legitimate
/// shrink-to-a-point; flags a numerical bug rather than physics.
struct IntegratorError : Error {
  using Error::Error;
};

}  // namespace nullcone
