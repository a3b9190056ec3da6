#pragma once

#include <stdexcept>
#include <string>

namespace prospect {

/// Coarse error category; the CLI maps each one to a distinct exit code.
enum class ErrorKind {
    usage,      // bad flags, bad sizes, bad templates
    data,       // malformed or inconsistent input files
    backend,    // scorer / embedder / reward backend failures
    io,         // filesystem failures
    invariant,  // internal contract violated
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct EmptyDatasetError : Error {
    explicit EmptyDatasetError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct InputError : Error {
    explicit InputError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct StaleCacheError : Error {
    explicit StaleCacheError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct TemplateError : Error {
    explicit TemplateError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct InvariantError : Error {
    explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Backend failure. Transport errors and 5xx/429 responses are retryable;
/// protocol/contract violations are not.
class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retryable)
        : Error(ErrorKind::backend, what), retryable_(retryable) {}
    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

struct EmptyContinuationError : Error {
    explicit EmptyContinuationError(const std::string& what) : Error(ErrorKind::data, what) {}
};

}  // namespace prospect
