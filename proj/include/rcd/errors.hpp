#pragma once

#include <stdexcept>
#include <string>

namespace rcd {

// Error classes map onto the CLI exit codes: input problems -> 2,
// failed certification checks -> 1, broken internal invariants -> 3.

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable/ill-formed input: bad grammar, wrong arity, malformed numbers.
struct InvalidInputError : Error {
  using Error::Error;
};

// Structurally valid input that is not a regular coordinate system
// (missing pure power, constant term, variable beyond the triangular range).
struct NotRegularError : Error {
  using Error::Error;
};

// Parameter outside its contract (mu <= 1, delta out of range, bad ladder).
struct InvalidParameterError : Error {
  using Error::Error;
};

// A computation hit a degenerate configuration (all pure coefficients vanish
// at the base point, empty envelope).
struct DegenerateInputError : Error {
  using Error::Error;
};

// The requested scale admits no crossing radius in (0,1); the scale is above
// the validity threshold. Only reachable in relaxed mode.
struct InfeasibleScaleError : Error {
  using Error::Error;
};

// Not enough data for a fit (scale ladders need >= 3 rungs).
struct InsufficientDataError : Error {
  using Error::Error;
};

// A constructed object failed its own acceptance grid (cutoff bridge, window
// descent exceeding its step budget).
struct ConstructionError : Error {
  using Error::Error;
};

// An internal invariant failed; indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace rcd
