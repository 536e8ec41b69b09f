#include "prophet/error.hpp"

namespace prophet {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Io: return "io error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Version: return "version error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Capacity: return "capacity error";
    case ErrorKind::Duplicate: return "duplicate error";
    case ErrorKind::UnsupportedSpec: return "unsupported spec";
    case ErrorKind::Contract: return "contract violation";
    }
    return "error";
}

}  // namespace prophet
