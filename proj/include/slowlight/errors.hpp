#pragma once

#include <stdexcept>
#include <string>

namespace slowlight {

// Malformed user input: scenario files, broken parameter invariants.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Out-of-domain or non-finite numeric arguments to a physics routine.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The marching scheme breached one of its own tolerances.
struct integration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace slowlight
