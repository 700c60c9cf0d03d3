#pragma once

#include <stdexcept>
#include <string>

namespace lle {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad shape, out-of-range
/// parameter, malformed input file). Maps to CLI exit code 2.
struct ContractViolation : Error {
    using Error::Error;
};

/// Input file could not be parsed.
struct ParseError : ContractViolation {
    using ContractViolation::ContractViolation;
};

/// A numeric computation failed at runtime (singular solve, non-PSD
/// kernel, diverging optimizer). Maps to CLI exit code 1.
struct NumericalError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace lle
