#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specgen {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bundle could not be loaded. `key()` names the manifest key at fault.
class LoadError : public Error {
public:
    LoadError(std::string key, const std::string& message)
        : Error("bundle load error [" + key + "]: " + message), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Malformed text input (C source, annotations, tool output).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Lexical error in C source (unterminated comment or literal).
class LexError : public ParseError {
public:
    using ParseError::ParseError;
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Function lookup or brace balancing failed while measuring code.
class MetricError : public Error {
public:
    using Error::Error;
};

/// A required external program is missing or cannot be started.
class EnvironmentError : public Error {
public:
    using Error::Error;
};

/// The verifier ran but produced no usable result (crash, no summary).
class VerificationInfraError : public Error {
public:
    using Error::Error;
};

/// Failure talking to the LLM backend. Every kind may succeed on a later
/// attempt; the gateway itself only retries Transport failures.
class GatewayError : public Error {
public:
    enum class Kind { Transport, HttpStatus, Credential, Protocol, NoMockResponse };

    GatewayError(Kind kind, const std::string& message, int http_status = 0)
        : Error(message), kind_(kind), http_status_(http_status) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool retriable() const noexcept { return kind_ != Kind::NoMockResponse; }
    [[nodiscard]] int http_status() const noexcept { return http_status_; }

private:
    Kind kind_;
    int http_status_;
};

/// No region of an LLM response could be identified as the target function.
class ExtractionError : public Error {
public:
    using Error::Error;
};

/// Writing records failed part-way. `written()` records already on disk.
class IoError : public Error {
public:
    IoError(const std::string& message, std::size_t written = 0)
        : Error(message), written_(written) {}

    [[nodiscard]] std::size_t written() const noexcept { return written_; }

private:
    std::size_t written_;
};

/// Bad command line or configuration. `key()` names the offending setting.
class UsageError : public Error {
public:
    UsageError(std::string key, const std::string& message)
        : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace specgen
