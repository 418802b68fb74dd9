#pragma once

#include <stdexcept>
#include <string>

namespace tfgs {

// Invalid parameters or configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Divergent integral (tail or norm).
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 2F1 at z = 1 with c - a - b <= 0.
struct KernelSingular : std::domain_error {
    using std::domain_error::domain_error;
};

// Zero or collapsed state where a quotient is undefined (CLI exit code 4).
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tail fit failure (non-positive samples in the window).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tfgs
