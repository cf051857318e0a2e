#pragma once

#include <stdexcept>
#include <string>

namespace riskbandit {

// Bad user-supplied input: out-of-range parameters, invalid specs, malformed
// files. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Structurally impossible configuration (e.g. fewer than two arms).
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A statistic was requested from an empty sample.
class UndefinedStatistic : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Rejection sampling gave up; the mixture puts (almost) no mass on [floor, 1].
class DegenerateMixture : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace riskbandit
