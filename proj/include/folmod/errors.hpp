#pragma once

#include <stdexcept>
#include <string>

namespace folmod {

// Raised for malformed run configurations (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a flowed foliation loses graph monotonicity.
struct FlowDegeneracyError : std::runtime_error {
    int leaf_index;
    FlowDegeneracyError(const std::string& msg, int leaf)
        : std::runtime_error(msg), leaf_index(leaf) {}
};

// Raised when a singular integrand/weight is hit (CLI exit code 3).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace folmod
