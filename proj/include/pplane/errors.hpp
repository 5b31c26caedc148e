#pragma once

#include <stdexcept>
#include <string>

namespace pplane {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent input data (problem files, coordinates, configs).
/// CLI exit code 2.
struct InputError : Error {
  using Error::Error;
};

/// Failure inside a solver run. CLI exit code 3.
struct SolverError : Error {
  using Error::Error;
};

/// Two pins of different nets share identical coordinates.
struct DuplicateCrossNetPinError : InputError {
  using InputError::InputError;
};

/// A pin lies outside the board extents.
struct PinOutsideBoardError : InputError {
  using InputError::InputError;
};

/// A net owns no cells in a partition, so the island-count metric is undefined.
struct NetVanishedError : SolverError {
  using SolverError::SolverError;
};

/// Training loss became non-finite.
struct TrainingDivergedError : SolverError {
  using SolverError::SolverError;
};

/// Two nets have zero pairwise distance; inverse-distance clustering is undefined.
struct CoincidentNetsError : InputError {
  using InputError::InputError;
};

/// Synthetic problem generation exhausted its rejection-sampling retries.
struct GenerationStuckError : SolverError {
  using SolverError::SolverError;
};

}  // namespace pplane
