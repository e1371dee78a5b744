#pragma once

#include <stdexcept>
#include <string>

namespace vikey {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration (config file, flags, manifest schema).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input data that violates a documented format or invariant.
class FormatError : public Error {
public:
    using Error::Error;
};

// Remote endpoint failure after retries were exhausted.
class TransportError : public Error {
public:
    using Error::Error;
};

}  // namespace vikey
