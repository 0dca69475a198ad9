#pragma once

#include <stdexcept>
#include <string>

namespace spinstar {

/// Violated precondition or shape mismatch at an API boundary.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input whose size exceeds what dense materialization supports.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// A numerical routine failed (e.g. eigensolver did not converge).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)), detail_(what) {}

    const std::string& key() const noexcept { return key_; }
    /// Message without the key prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string key_;
    std::string detail_;
};

/// Malformed command line or config file.
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// CSV content does not match the expected schema.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace spinstar
