// SPDX-License-Identifier: Apache-2.0
#ifndef MODCALC_CORE_ERRORS_HPP
#define MODCALC_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace modcalc {

// Root of all library exceptions so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes, axis counts, or grid sizes do not match.
struct DimensionError : Error {
  using Error::Error;
};

// A grid/basis pair is not aligned the way an operation requires
// (e.g. a norm basis that is not a scaled permutation of the grid axes,
// or a symbol sampled on a grid incompatible with the signal grid).
struct AlignmentError : Error {
  using Error::Error;
};

// Operation implemented only for identity-basis grids was handed
// a skewed basis.
struct UnsupportedBasisError : Error {
  using Error::Error;
};

// A field contains NaN or Inf where finite data is required.
struct InvalidFieldError : Error {
  using Error::Error;
};

// Requested derivative order would amplify round-off beyond the
// stability threshold.
struct OrderTooHighError : Error {
  using Error::Error;
};

// Malformed or truncated file, bad magic, unsupported version.
struct FormatError : Error {
  using Error::Error;
};

// Invalid user-facing configuration (CLI/JSON specs).
struct ConfigError : Error {
  using Error::Error;
};

// A scenario's hypothesis check failed; the run is neither pass nor fail.
struct InapplicableError : Error {
  using Error::Error;
};

// A window with (numerically) zero mass, or an invalid window table.
struct InvalidWindowError : Error {
  using Error::Error;
};

// An envelope fit was requested on data that admits no fit (all zero).
struct UndefinedFitError : Error {
  using Error::Error;
};

// A probe point lies outside the sampled grid.
struct InvalidProbeError : Error {
  using Error::Error;
};

// A Lebesgue exponent outside (0, infinity].
struct InvalidExponentError : Error {
  using Error::Error;
};

// Overflow, non-convergence, or other numeric breakdown.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace modcalc

#endif
