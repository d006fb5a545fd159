#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nrf {

/// Invalid user input: matrix shape, spec field out of range, design file syntax.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::size_t line = 0, std::string key = {})
        : std::runtime_error(what), line_(line), key_(std::move(key)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

/// Numerical failure tied to a sweep frequency (singular system, spectral fold, non-settling transient).
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double frequency_hz, std::string module)
        : std::runtime_error(what), frequency_hz_(frequency_hz), module_(std::move(module)) {}

    double frequency_hz() const noexcept { return frequency_hz_; }
    const std::string& module() const noexcept { return module_; }

private:
    double frequency_hz_;
    std::string module_;
};

}  // namespace nrf
