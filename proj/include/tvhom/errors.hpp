#pragma once

#include <stdexcept>
#include <string>

namespace tvhom {

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A position or weight was NaN or infinite.
struct NonFiniteInput : Error {
    using Error::Error;
};

/// All atoms had zero weight; the empty measure is not representable.
struct EmptyMeasure : Error {
    using Error::Error;
};

/// The product of support sizes in a convolution step exceeds the configured cap.
struct AtomBudgetExceeded : Error {
    using Error::Error;
};

/// A probability mass function contained a zero (or negative) entry.
struct ZeroProbability : Error {
    using Error::Error;
};

/// Two mass functions that must share an alphabet do not.
struct AlphabetMismatch : Error {
    using Error::Error;
};

/// Mixture weights have the wrong length or do not sum to one.
struct WeightMismatch : Error {
    using Error::Error;
};

/// A full enumeration (outcomes, compositions, score supports) exceeds its cap.
struct EnumerationBudgetExceeded : Error {
    using Error::Error;
};

/// Smoothing parameter outside (0, 1).
struct BadDelta : Error {
    using Error::Error;
};

/// A measure required to be admissible is not, at the requested tolerance.
struct NotAdmissible : Error {
    using Error::Error;
};

/// The linearization factor is >= 1 so the constant C(eps) is undefined.
struct DeltaTooLarge : Error {
    using Error::Error;
};

/// No point of the optimizer grid satisfies the feasibility condition.
struct NoFeasiblePoint : Error {
    using Error::Error;
};

/// An observed quantity contradicts a proven bound; signals an implementation bug.
struct TheoremViolation : Error {
    using Error::Error;
};

/// Malformed input file (JSON schema violations carry field diagnostics).
struct InputParseError : Error {
    using Error::Error;
};

}  // namespace tvhom
