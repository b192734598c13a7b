#pragma once

#include <stdexcept>
#include <string>

namespace gdpm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A coordinate lies outside the generator's domain (or too close to its boundary).
struct DomainError : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Argument outside the range of f over z >= 0.
struct RangeError : Error {
    using Error::Error;
};

// f'(0) is infinite for the given spec (power mean with a = 0, beta < 1).
struct InfiniteWeightError : Error {
    using Error::Error;
};

// Weighted update stalled: center coincides with a member point while f'(0) = inf.
struct OverlapStallError : Error {
    using Error::Error;
};

struct EmptyClusterError : Error {
    using Error::Error;
};

struct LineSearchFailure : Error {
    using Error::Error;
};

struct SingularGError : Error {
    using Error::Error;
};

// No closed-form robustness rule for the requested (f, divergence) pair.
struct UnsupportedPairError : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct EmptyDatasetError : Error {
    using Error::Error;
};

struct ZeroVarianceError : Error {
    using Error::Error;
};

struct BadDimensionsError : Error {
    using Error::Error;
};

}  // namespace gdpm
