// errors.hpp - exception hierarchy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace avocado {

// Base of all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed files, mismatched grids, invalid parameter values.
// The CLI maps these to exit code 2.
struct DataError : Error {
    using Error::Error;
};

// Singular systems, degenerate configurations, failed numerical guarantees.
// The CLI maps these to exit code 3.
struct NumericalError : Error {
    using Error::Error;
};

}  // namespace avocado
