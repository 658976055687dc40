#pragma once

#include <stdexcept>
#include <string>

namespace hypfrac {

// Invalid argument outside an operation's mathematical domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Adaptive quadrature gave up; `estimate` is the last error estimate.
struct QuadratureError : std::runtime_error {
    double estimate;
    QuadratureError(const std::string& what, double est)
        : std::runtime_error(what), estimate(est) {}
};

struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Kernel table failed its own invariants (monotonicity, asymptotic bands).
struct TableRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// User-supplied configuration is malformed or out of range.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace hypfrac
