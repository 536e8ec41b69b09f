#pragma once

#include <stdexcept>
#include <string>

namespace prophet {

enum class ErrorKind {
    Io,
    Parse,
    Format,
    Version,
    Schema,
    Usage,
    Capacity,
    Duplicate,
    UnsupportedSpec,
    Contract,
};

/// Error raised by every fallible operation in the library. The kind maps
/// onto the CLI exit-code scheme through exit_code().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// 0 ok, 2 I/O, 3 version, 4 schema, 1 everything else.
inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Io:
        return 2;
    case ErrorKind::Version:
        return 3;
    case ErrorKind::Schema:
        return 4;
    default:
        return 1;
    }
}

const char* to_string(ErrorKind kind) noexcept;

}  // namespace prophet
