#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revshare {

/// Invalid input to one of the library modules. `module()` names the module
/// that rejected it so front ends can report where the problem came from.
class DomainError : public std::invalid_argument {
public:
    DomainError(std::string module, const std::string& message)
        : std::invalid_argument(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(std::string module, const std::string& message, double residual)
        : std::runtime_error(module + ": " + message), module_(std::move(module)), residual_(residual) {}

    const std::string& module() const noexcept { return module_; }
    double residual() const noexcept { return residual_; }

private:
    std::string module_;
    double residual_;
};

/// Text input (config, ledger) that could not be parsed. Line and column are
/// 1-based; column 0 means "whole line".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          source_(std::move(source)), line_(line), column_(column), message_(message) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string source_;
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

}  // namespace revshare
