#ifndef CMUS_ERRORS_HPP
#define CMUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cmus {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// n >= 0 or n not congruent to 0, 1 mod 4.
struct NotADiscriminant : Error {
    explicit NotADiscriminant(long long n)
        : Error("not a discriminant: " + std::to_string(n)) {}
};

// The requested certified error bound cannot be met at the given precision.
struct PrecisionExhausted : Error {
    using Error::Error;
};

// A certified comparison hit the precision cap with the quantity still
// straddling the threshold.
struct Undecidable : Error {
    using Error::Error;
};

struct ToleranceNotMet : Error {
    using Error::Error;
};

struct PreconditionNotUnit : Error {
    using Error::Error;
};

struct EtaCollision : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

// Resuming a scan whose configuration hash differs from the checkpoint.
struct ConfigMismatch : Error {
    using Error::Error;
};

struct IoFailure : Error {
    using Error::Error;
};

} // namespace cmus

#endif
