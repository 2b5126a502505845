#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ergo {

// Bad user input: malformed expressions, invalid parameter ranges,
// unknown config keys. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation failed: eigensolve did not converge, integral diverges,
// negative density, empty feasible region. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Expression syntax error; carries the byte offset of the offending token.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ConfigError(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

}  // namespace ergo
