#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sphsym {

// Exceptions thrown by the C++ core. The C API maps each type to a status
// code (see sphsym.h); anything else surfaces as SPHSYM_ERR_INTERNAL.

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exact enumeration refused because n exceeds the configured limit.
class LimitExceeded : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input text (CSV rows, distribution descriptors).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Experiment configuration schema violation; key() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument("config key '" + key + "': " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace sphsym
