#pragma once

#include <stdexcept>
#include <string>

namespace dwell {

// All failure modes surface as typed exceptions so callers (and the CLI
// exit-code mapping) can distinguish them.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// numerics
struct NoSignChangeError : Error {
    using Error::Error;
};
struct MaxIterationsError : Error {
    using Error::Error;
};
struct StepUnderflowError : Error {
    using Error::Error;
};

// physics domain
struct DomainError : Error {
    using Error::Error;
};
struct NoBoundModeError : Error {
    using Error::Error;
};
struct DensityFloorError : Error {
    using Error::Error;
};
struct DegenerateModesError : Error {
    using Error::Error;
};

// trajectories / timing
struct QuantileFailureError : Error {
    using Error::Error;
};
struct BisectionFailureError : Error {
    using Error::Error;
};
struct ClassMismatchError : Error {
    using Error::Error;
};
struct ZeroFluxError : Error {
    using Error::Error;
};

// cli
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace dwell
