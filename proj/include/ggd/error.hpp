#pragma once

#include <stdexcept>
#include <string>

namespace ggd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A sample value lies at or below the translation parameter.
class InvalidSupport : public Error {
public:
    using Error::Error;
};

/// Shape too small for the Fisher matrix to exist (rho <= 2).
class ShapeOutOfRange : public Error {
public:
    using Error::Error;
};

/// Singular system, divergence, or no bracketing root.
class NumericFailure : public Error {
public:
    using Error::Error;
};

/// Moment initializer could not invert the sample moments.
class InitFailure : public Error {
public:
    using Error::Error;
};

class DegenerateGroups : public Error {
public:
    using Error::Error;
};

class DegenerateTraining : public Error {
public:
    using Error::Error;
};

class IncompleteInput : public Error {
public:
    using Error::Error;
};

/// Raised while reading an input tree; the message names the offending path.
class IngestError : public Error {
public:
    using Error::Error;
};

}  // namespace ggd
