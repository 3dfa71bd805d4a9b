#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace rep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (negative density, t >= T, ...).
struct DomainError : Error {
    using Error::Error;
};

/// |v| >= c where a subluminal velocity is required.
struct SuperluminalError : Error {
    using Error::Error;
};

/// Conserved-to-primitive recovery found no admissible root.
struct RecoveryFailure : Error {
    RecoveryFailure(std::size_t cell, const std::string& what)
        : Error("recovery failure at cell " + std::to_string(cell) + ": " + what), cell(cell) {}
    std::size_t cell;
};

/// Initial data do not satisfy p'(rho0) < a c^2.
struct HypothesisViolation : Error {
    using Error::Error;
};

struct InvalidTestingFunction : Error {
    using Error::Error;
};

/// Bad configuration; `field` names the offending key.
struct ConfigError : Error {
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field(std::move(field)) {}
    std::string field;
};

} // namespace rep
