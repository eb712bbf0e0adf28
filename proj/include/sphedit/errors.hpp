#pragma once

#include <stdexcept>
#include <string>

namespace sphedit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad pipeline/config input (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// File read/write failure (CLI exit code 3).
struct IoError : Error {
    using Error::Error;
};

// Numeric failure inside an algorithm (CLI exit code 4).
struct NumericError : Error {
    using Error::Error;
};

struct DegeneratePointsError : NumericError {
    using NumericError::NumericError;
};

struct NoConvergenceError : NumericError {
    using NumericError::NumericError;
};

struct RankDeficientError : NumericError {
    using NumericError::NumericError;
};

struct DegreeTooLowError : NumericError {
    using NumericError::NumericError;
};

struct RegionsOverlapError : NumericError {
    RegionsOverlapError(const std::string& msg, long pixels)
        : NumericError(msg), overlap_pixels(pixels) {}
    long overlap_pixels = 0;
};

} // namespace sphedit
