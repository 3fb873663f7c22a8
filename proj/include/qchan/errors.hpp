#pragma once

#include <stdexcept>
#include <string>

namespace qchan {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotHermitian : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct NegativeSpectrum : Error {
  using Error::Error;
};
struct BadExponent : Error {
  using Error::Error;
};
struct OutOfRange : Error {
  using Error::Error;
};
struct NotUnitary : Error {
  using Error::Error;
};
struct WeightsInvalid : Error {
  using Error::Error;
};
struct BadPartition : Error {
  using Error::Error;
};
struct NotAState : Error {
  using Error::Error;
};
struct SupportViolation : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct NotStochastic : Error {
  using Error::Error;
};
struct BadRecipe : Error {
  using Error::Error;
};
struct RangeInvalid : Error {
  using Error::Error;
};
struct ConfigInvalid : Error {
  using Error::Error;
};
struct IoFailure : Error {
  using Error::Error;
};

}  // namespace qchan
