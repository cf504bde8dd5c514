#ifndef PERSENT_ERRORS_HPP
#define PERSENT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace persent {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration: bad flag values, impossible model shapes, unknown
// strategies. CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// Broken input data: malformed XML, corrupt dataset records, bad vector
// files. CLI exit code 3.
struct DataError : Error {
    using Error::Error;
};

// XML errors carry the byte offset of the failure in the input stream.
struct XmlError : DataError {
    std::size_t byte_offset;
    XmlError(std::size_t offset, const std::string& msg)
        : DataError("xml error at byte " + std::to_string(offset) + ": " + msg),
          byte_offset(offset) {}
};

// Tensor shape mismatch; message names both shapes. A kind of configuration
// error (wrong model dimensions), so it shares exit code 2.
struct ShapeError : ConfigError {
    using ConfigError::ConfigError;
};

// Numerical failure during training (non-finite loss/weights). CLI exit code 4.
struct NumericError : Error {
    using Error::Error;
};

// A translation backend failed for one request.
struct TranslatorError : Error {
    using Error::Error;
};

}  // namespace persent

#endif  // PERSENT_ERRORS_HPP
