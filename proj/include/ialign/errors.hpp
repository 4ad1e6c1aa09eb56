#pragma once

#include <stdexcept>
#include <string>

namespace ialign {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file content (bad JSON, bad field types). Carries the
// 1-based line number of the offending line when known.
class ParseError : public Error {
public:
    ParseError(size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    size_t line() const { return line_; }

private:
    size_t line_;
};

// Input violates a documented precondition (unknown label, duplicate id,
// empty premise, length mismatch, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Tensor dimensions do not match what an operation expects.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

// Out-of-range class or position index.
class IndexError : public Error {
public:
    explicit IndexError(const std::string& what) : Error(what) {}
};

// Argument outside the mathematical domain of a function (e.g. |r| > 1).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// A statistic is undefined because a sample has zero variance.
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(what) {}
};

// Too few usable records to compute the requested aggregate.
class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what) : Error(what) {}
};

// Filesystem-level failure (missing file, unwritable directory).
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace ialign
