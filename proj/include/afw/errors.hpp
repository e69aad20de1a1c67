/**
 * @file errors.hpp
 * @brief Exception types shared by every module.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace afw {

/// Caller supplied a value outside the operation's domain (non-finite input,
/// non-positive airspeed, malformed config, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition on internal state was broken (dimension mismatch, non-PD
/// covariance handed to the update).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical or physical failure at a known step of a time-stepped process.
class FaultError : public std::runtime_error {
public:
    FaultError(const std::string& what, std::int64_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

/// An adaptive loop's gains or covariance left the finite, bounded region.
class DivergenceError : public FaultError {
public:
    using FaultError::FaultError;
};

}  // namespace afw
