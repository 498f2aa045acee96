#pragma once

#include <stdexcept>
#include <string>

namespace kdv5 {

/// Precondition of an operation was not met by the caller.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A weight ramp or non-negligible integrand left the periodic window.
class SupportViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite state detected during time stepping.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, double last_good_time)
        : std::runtime_error(what), last_good_time_(last_good_time) {}
    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

}  // namespace kdv5
