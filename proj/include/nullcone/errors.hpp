#pragma once

#include <stdexcept>
#include <string>

namespace nullcone {

// Bad shapes, out-of-range parameters, violated preconditions.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation would exceed its configured size or time budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Floating-point breakdown, e.g. a marginal became singular mid-iteration.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The requested run cannot certify either verdict.
struct InconclusiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed JSON or CSV input.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nullcone
