#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fixlab {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// An identifier that is neither a declared variable nor a known function.
class UnknownVariableError : public ParseError {
public:
    UnknownVariableError(std::string name, std::size_t offset)
        : ParseError("unknown identifier '" + name + "'", offset), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class EvalError : public Error {
public:
    enum class Kind { missing_binding, domain };

    EvalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Raised when a space, map, comparison function or configuration fails validation.
class LoadError : public Error {
public:
    using Error::Error;
};

}  // namespace fixlab
