#pragma once

#include <stdexcept>
#include <string>

namespace reprank {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rating value outside the table's scale (or non-integer on a discrete scale).
class RangeError : public Error {
public:
    using Error::Error;
};

/// A (user, object) pair rated more than once.
class DuplicateRatingError : public Error {
public:
    using Error::Error;
};

/// A user or object id outside the table's dimensions.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Vector lengths that do not match the table they are used with.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Empty or otherwise degenerate input (zero dimensions, empty dataset,
/// empty or full benchmark set, fewer than two ranked items).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A zero-degree user or object where the operation requires ratings.
class IsolatedError : public Error {
public:
    using Error::Error;
};

/// Malformed input text; the message carries file and line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Unreadable or unwritable file.
class IoError : public Error {
public:
    using Error::Error;
};

/// A sparsity target that cannot be met by the requested dimensions.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// NaN or infinity produced (or supplied) where finite values are required.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace reprank
