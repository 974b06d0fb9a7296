#pragma once

#include <stdexcept>
#include <string>

namespace mmse {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension or sample-space mismatch between objects that must agree.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// An argument outside its admissible range (negative bound, non-conjugate exponents, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Conditioning on a block that carries no probability mass.
class ZeroMassBlockError : public Error {
public:
    ZeroMassBlockError(std::size_t block, const std::string& what)
        : Error(what), block_(block) {}
    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

/// A measure charges a point its reference measure does not.
class AbsoluteContinuityError : public Error {
public:
    using Error::Error;
};

/// Pasting would divide by the mass of a block the tail measure does not charge.
class PastingDegeneracyError : public Error {
public:
    PastingDegeneracyError(std::size_t block, const std::string& what)
        : Error(what), block_(block) {}
    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

/// Operation requires a proper (mutually equivalent, strictly positive) measure set.
class ProperError : public Error {
public:
    using Error::Error;
};

/// Combinatorial guard refused the request (too many blocks, too deep a tree, ...).
class GuardRefusal : public Error {
public:
    using Error::Error;
};

/// Instance-file validation failure; `path()` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Should-not-happen condition inside a numerical routine.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace mmse
