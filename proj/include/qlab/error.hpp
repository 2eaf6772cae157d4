#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operand shapes do not match the operation (non-square input, size mismatch).
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

/// Vectors or operators belong to incompatible geometric spaces, or the
/// space itself violates a requirement (unsorted signature, wrong signature
/// class for the operation).
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what) : Error(what) {}
};

/// A documented precondition was violated (non-hermitian input, zero vector,
/// non-unitary block, ...).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

/// An iterative routine failed to converge or produced non-finite values.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// Scenario text could not be parsed or validated. `code` distinguishes the
/// failure classes that the command line maps to exit statuses.
class ParseError : public Error {
public:
    enum class Code { Syntax, Shape, NotIsometry, NotState, Value };

    ParseError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

}  // namespace qlab
