#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace wlt {

/// A precondition on a numeric argument was violated.
class argument_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A bound was requested outside the parameter range in which it is asserted.
/// `threshold` carries the limiting value (e.g. the epsilon threshold).
class validity_error : public std::domain_error {
public:
    validity_error(const std::string& what, double threshold)
        : std::domain_error(what), threshold_(threshold) {}

    [[nodiscard]] double threshold() const noexcept { return threshold_; }

private:
    double threshold_;
};

/// Quadrature / root finding failed to reach the requested accuracy.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class capacity_error : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Malformed configuration. `field()` names the offending key path.
class config_error : public std::runtime_error {
public:
    config_error(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

}  // namespace wlt
