#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tractionopt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user input (cycle files, parameter sets).
class InputError : public Error {
public:
    InputError(const std::string& what, std::size_t row = 0)
        : Error(row > 0 ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}

    [[nodiscard]] std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

/// Invalid or missing configuration value; `key` is the dotted path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error("config '" + key + "': " + what), key_(key) {}

    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// A design cannot serve a requested operating point.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

}  // namespace tractionopt
