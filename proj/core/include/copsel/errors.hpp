#pragma once

#include <stdexcept>
#include <string>

namespace copsel {

/// Caller broke a documented precondition (dimension mismatch, bad range).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input document. `where` names the offending field or line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, const std::string& what)
        : std::runtime_error("parse error at '" + where + "': " + what), where_(where) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// Instance generation could not satisfy the requested spec.
class GenerationError : public std::runtime_error {
public:
    GenerationError(const std::string& what, int retries)
        : std::runtime_error(what + " (after " + std::to_string(retries) + " retries)"),
          retries_(retries) {}
    int retries() const noexcept { return retries_; }

private:
    int retries_;
};

/// Bad configuration (unknown key, type mismatch, invalid solver setup).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or inconsistent data files at runtime.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace copsel
