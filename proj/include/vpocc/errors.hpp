#pragma once

#include <stdexcept>
#include <string>

namespace vpocc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File / parse failures (CLI exit code 2).
class IoError : public Error {
public:
    using Error::Error;
};

/// Domain and geometry failures (CLI exit code 3).
class DomainError : public Error {
public:
    using Error::Error;
};

class CoincidentPoints : public DomainError {
public:
    using DomainError::DomainError;
};

class ParallelLines : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateQuad : public DomainError {
public:
    using DomainError::DomainError;
};

class PointAtInfinity : public DomainError {
public:
    using DomainError::DomainError;
};

class NearSingular : public DomainError {
public:
    using DomainError::DomainError;
};

class NonPositiveDepth : public DomainError {
public:
    using DomainError::DomainError;
};

class VpOutOfBounds : public DomainError {
public:
    using DomainError::DomainError;
};

class CoincidentVpRef : public DomainError {
public:
    using DomainError::DomainError;
};

class DimensionMismatch : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace vpocc
