#pragma once

#include <stdexcept>
#include <string>

namespace phasels {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSignal : Error {
  using Error::Error;
};
struct NonCoprimeShifts : Error {
  using Error::Error;
};
struct InvalidShift : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct TooFewSpikes : Error {
  using Error::Error;
};
struct MissingMask : Error {
  using Error::Error;
};
struct DisconnectedGraph : Error {
  using Error::Error;
};
struct ZeroFrequency : Error {
  using Error::Error;
};
struct ZeroEntry : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct GridCollision : Error {
  using Error::Error;
};
struct InfeasibleSeparation : Error {
  using Error::Error;
};
struct ZeroReference : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

}  // namespace phasels
