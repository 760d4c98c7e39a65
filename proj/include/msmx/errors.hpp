#pragma once

#include <stdexcept>
#include <string>

namespace msmx {

// Error taxonomy maps onto CLI exit codes: validation/domain/dimension -> 1,
// numerical (singular pivot, divergence) -> 2, I/O -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace msmx
