#pragma once

#include <stdexcept>
#include <string>

namespace hitstats {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// dynamics
struct NotPeriodic : Error {
    using Error::Error;
};

// measure
struct DegenerateOrbit : Error {
    using Error::Error;
};

// targets
struct OverlappingUnion : Error {
    using Error::Error;
};
struct ZeroMeasureTarget : Error {
    using Error::Error;
};

// counting
struct AllZero : Error {
    using Error::Error;
};
struct EmptyConditional : Error {
    using Error::Error;
};

// compound
struct NotMonotone : Error {
    using Error::Error;
};
struct ZeroExtremalIndex : Error {
    using Error::Error;
};

// harness
struct ConfigError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

} // namespace hitstats
