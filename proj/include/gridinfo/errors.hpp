#pragma once

#include <stdexcept>
#include <string>

namespace gridinfo {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A density's tails are still above tail_floor at the grid boundary.
struct SupportTooNarrow : Error {
    using Error::Error;
};

// Two grids that must share a step (or alignment) do not.
struct GridMismatch : Error {
    using Error::Error;
};

// affine_push with scale == 0.
struct ZeroScale : Error {
    using Error::Error;
};

// A density is numerically unusable for the requested operation
// (mass vanished, too few valid score points, broken posterior, ...).
struct DegenerateDensity : Error {
    using Error::Error;
};

// Monte Carlo binning left too little usable data.
struct InsufficientSamples : Error {
    using Error::Error;
};

// A numeric root/extrapolation routine failed to converge or bracket.
struct SolverFailed : Error {
    using Error::Error;
};

// A t-sweep needs at least three strictly decreasing values.
struct TSweepTooShort : Error {
    using Error::Error;
};

// Config file is not syntactically valid.
struct ParseError : Error {
    using Error::Error;
};

// Config parsed but violates invariants; message lists every violation.
struct ValidationError : Error {
    using Error::Error;
};

// Filesystem trouble while emitting reports.
struct IoError : Error {
    using Error::Error;
};

}  // namespace gridinfo
