#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gms {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// AT2/CSV header could not be parsed (NPTS/DT missing or invalid).
class MalformedHeader : public Error {
public:
    using Error::Error;
};

/// Number of samples found does not match the declared count.
class SampleCountMismatch : public Error {
public:
    using Error::Error;
};

/// A sample is NaN or infinite.
class NonFiniteSample : public Error {
public:
    using Error::Error;
};

/// Record grid (dt, n_steps) does not match the basis grid.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Weight vector refers to a different basis than the one supplied.
class BasisMismatch : public Error {
public:
    using Error::Error;
};

/// Symmetric eigensolver failed to converge within its sweep budget.
class EigenFailure : public Error {
public:
    using Error::Error;
};

/// Every singular value of the suite is zero.
class AllZeroSuite : public Error {
public:
    using Error::Error;
};

/// A story stiffness is zero or negative.
class NonPositiveStiffness : public Error {
public:
    using Error::Error;
};

/// Newton iteration did not converge, even after the substep retry.
class NonConvergence : public Error {
public:
    NonConvergence(std::size_t step, double residual, const std::string& msg)
        : Error(msg), step(step), residual(residual) {}
    std::size_t step;
    double residual;
};

/// Training loss became NaN/Inf.
class NonFiniteLoss : public Error {
public:
    using Error::Error;
};

/// R^2 is undefined because the target has zero variance.
class DegenerateTarget : public Error {
public:
    using Error::Error;
};

/// Configuration file is missing, malformed, or violates the schema.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be read/written or has an invalid format.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace gms
