#pragma once

#include <stdexcept>
#include <string>

namespace sdheat {

// bad input: maps to exit code 2 / SDH_ERR_ARGUMENT
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// tolerance or convergence could not be met: exit code 3 / SDH_ERR_CONVERGENCE
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ArgumentError(what);
}

}  // namespace sdheat
