#pragma once

#include <stdexcept>
#include <string>

namespace qring {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct DegenerateDrive : Error {
    using Error::Error;
};
struct NotHermitian : Error {
    using Error::Error;
};
struct EigenFailure : Error {
    using Error::Error;
};
struct PerturbationInvalid : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct DegenerateSteadyState : Error {
    using Error::Error;
};
struct SingularRateGraph : Error {
    using Error::Error;
};
struct SolverFailure : Error {
    using Error::Error;
};
struct StepSizeTooLarge : Error {
    using Error::Error;
};
struct AxisMismatch : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace qring
