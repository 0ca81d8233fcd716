#pragma once

#include <stdexcept>
#include <string>

namespace fdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input or a violated model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The requested depth or tolerance cannot be certified with the arithmetic at hand.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// An enumeration exceeded its element cap.
class BudgetError : public Error {
public:
    using Error::Error;
};

} // namespace fdyn
