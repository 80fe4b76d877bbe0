#pragma once

#include <stdexcept>
#include <string>

namespace d2dcache {

/// Invalid model parameter or malformed configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure (quadrature, root bracketing) failed to converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation outside the mathematical domain of a formula (e.g. r = 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool condition, const std::string& message)
{
    if (!condition)
        throw ConfigError(message);
}

} // namespace detail

} // namespace d2dcache
