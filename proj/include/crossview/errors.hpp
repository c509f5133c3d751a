#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crossview {

// Base for all toolkit errors. The CLI maps these onto exit codes:
// validation/parse failures -> 1, I/O failures -> 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed input bytes. Carries the byte offset where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

// A required column or field is missing from an otherwise readable input.
class SchemaError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace crossview
