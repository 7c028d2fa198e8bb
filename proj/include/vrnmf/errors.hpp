#pragma once

#include <stdexcept>
#include <string>

namespace vrnmf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition on the input values is violated.
class ContractError : public Error {
public:
    using Error::Error;
};

/// A factor lost rank where the algorithm needs full column rank.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Requested quantity is not defined for the input (e.g. spectral angle of a
/// constant vector).
class UndefinedError : public Error {
public:
    using Error::Error;
};

/// A sampling procedure ran out of budget before meeting its constraints.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed, or its contents could not be parsed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace vrnmf
