#ifndef IMPLO_ERRORS_HPP
#define IMPLO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace implo {

// Exit-code classes used by the CLI: 2 = validation, 3 = numerical, 4 = I/O.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRange : ValidationError {
    using ValidationError::ValidationError;
};
struct TimeBeyondBlowup : ValidationError {
    using ValidationError::ValidationError;
};
struct ZeroAmplitude : ValidationError {
    using ValidationError::ValidationError;
};
struct ZeroVector : ValidationError {
    using ValidationError::ValidationError;
};
struct UnsupportedOrder : ValidationError {
    using ValidationError::ValidationError;
};
struct GridTooCoarse : ValidationError {
    using ValidationError::ValidationError;
};
struct ProfileTooShort : ValidationError {
    using ValidationError::ValidationError;
};

struct NegativeRadicand : NumericalError {
    using NumericalError::NumericalError;
};
struct DegenerateOrder : NumericalError {
    using NumericalError::NumericalError;
};
struct DenominatorVanished : NumericalError {
    using NumericalError::NumericalError;
};
struct ToleranceNotMet : NumericalError {
    using NumericalError::NumericalError;
};
struct NoConvergence : NumericalError {
    using NumericalError::NumericalError;
};
struct CflViolation : NumericalError {
    using NumericalError::NumericalError;
};
struct VacuumEncountered : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace implo

#endif
