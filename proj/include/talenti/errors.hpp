#pragma once

#include <stdexcept>
#include <string>

namespace talenti {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid arguments or violated preconditions (bad grid sizes, out-of-range
// volumes, mismatched grids, negative data where nonnegative is required).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed input files. The message carries file name plus row/column where
// that is known.
class ParseError : public Error {
public:
    using Error::Error;
};

// Output files that cannot be created, written, or moved into place.
class IoError : public Error {
public:
    using Error::Error;
};

// A computation produced a non-finite value or could not reach its target
// accuracy.
class NumericalError : public Error {
public:
    using Error::Error;
};

// The threshold search in the volume-constrained maximization hit a flat
// stretch of the level-measure function wider than machine tolerance.
class DegenerateLevelError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// An internal cross-check failed: a certificate did not validate, or a
// quantity that is provably signed came out with the wrong sign.
class ContractError : public Error {
public:
    using Error::Error;
};

}
