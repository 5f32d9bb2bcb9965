#pragma once

#include <stdexcept>
#include <string>

namespace pcbf {

// Root of all library errors; everything thrown on purpose derives from this.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative position has no usable direction (drone at obstacle center).
struct DegenerateGeometry : Error {
    using Error::Error;
};

// The two half-spaces have an empty intersection.
struct InfeasibleConstraints : Error {
    using Error::Error;
};

// A config, file schema, or type invariant was violated.
struct InvalidConfig : Error {
    using Error::Error;
};

// step() called on an env whose episode already ended.
struct SteppedAfterTermination : Error {
    using Error::Error;
};

// Batch inputs disagree on element count.
struct BatchShapeMismatch : Error {
    using Error::Error;
};

// Observation vector has the wrong arity for the consuming policy.
struct ShapeMismatch : Error {
    using Error::Error;
};

// Watchdog registry fed a step smaller than one it has already seen.
struct NonMonotonicStep : Error {
    using Error::Error;
};

// Filesystem operation failed; message carries errno text and path.
struct IoFailure : Error {
    using Error::Error;
};

// Saved artifact failed magic/version/length/hash verification.
struct CorruptArtifact : Error {
    using Error::Error;
};

// Dataset file violates the line-oriented schema; message carries a line locus.
struct MalformedDataset : Error {
    using Error::Error;
};

// Two maps that must share a key set do not.
struct KeyMismatch : Error {
    using Error::Error;
};

// Attempt fractions are negative or do not sum to one.
struct InvalidDistribution : Error {
    using Error::Error;
};

}  // namespace pcbf
