#pragma once

#include <stdexcept>
#include <string>

namespace dsmr {

// Error taxonomy shared across the library. The CLI maps these onto its
// documented exit codes (see tools/dsmrefine.cpp).

// Malformed or unreadable file contents (bad magic, truncation, bad version).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs violate an invariant (non-finite values, bad lengths).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor or grid dimensions do not compose.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration values or flag combinations.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation over zero valid elements (all-nodata grid, empty mask).
struct EmptyDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coordinates outside the valid extent.
struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grids that must share size and geotransform do not.
struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite value where the numeric contract requires finiteness.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Persisted state is internally inconsistent (missing parameter, size drift).
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dsmr
