#pragma once

#include <stdexcept>
#include <string>

namespace ordchain {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& what) : Error(what) {}
};

// Requested enumeration of an empty domain (e.g. ordinals below 0).
class EmptyDomainError : public Error {
public:
    explicit EmptyDomainError(const std::string& what) : Error(what) {}
};

// A position cut cannot be reached with the supplied enumeration prefix.
class InsufficientEnumerationError : public Error {
public:
    explicit InsufficientEnumerationError(const std::string& what) : Error(what) {}
};

class InvalidIntervalError : public Error {
public:
    explicit InvalidIntervalError(const std::string& what) : Error(what) {}
};

// A digit query on a lazily described expansion could not be resolved
// within the configured budget.
class UnresolvableDigitError : public Error {
public:
    explicit UnresolvableDigitError(const std::string& what) : Error(what) {}
};

class InvalidCodeError : public Error {
public:
    explicit InvalidCodeError(const std::string& what) : Error(what) {}
};

// Textual or binary input could not be parsed; carries a position when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t position = std::string::npos)
        : Error(what), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

class ProjectionMismatchError : public Error {
public:
    explicit ProjectionMismatchError(const std::string& what) : Error(what) {}
};

// A vertical section produced two distinct points; surfaces construction bugs.
class UniformityViolationError : public Error {
public:
    explicit UniformityViolationError(const std::string& what) : Error(what) {}
};

class OrderingViolationError : public Error {
public:
    explicit OrderingViolationError(const std::string& what) : Error(what) {}
};

class ResourceLimitError : public Error {
public:
    explicit ResourceLimitError(const std::string& what) : Error(what) {}
};

} // namespace ordchain
