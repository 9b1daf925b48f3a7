#pragma once

#include <stdexcept>
#include <string>

namespace ltft {

enum class ErrorKind {
    InvalidParameter,
    QuadratureFailure,
    FrameDegeneracy,
    IllConditionedFilter,
    Io,
    Usage,
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::FrameDegeneracy: return "frame-degeneracy";
    case ErrorKind::IllConditionedFilter: return "ill-conditioned-filter";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Usage: return "usage-error";
    }
    return "unknown";
}

/// Library-wide exception. The kind is machine-checkable, the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

}  // namespace ltft
