#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mentes {

enum class ErrorKind {
    DegenerateGeometry,
    InvalidState,
    InvalidIdentifier,
    InvalidMove,
    InvalidAngle,
    InvalidFold,
    InvalidPunch,
    SearchBudgetExceeded,
    GenerationFailed,
    MissingAsset,
    Unsolvable,
    EmptyGroup,
    UnsupportedVariant,
    Malformed,
    Conflict,
    ConfigError,
    IoError,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::InvalidIdentifier: return "InvalidIdentifier";
        case ErrorKind::InvalidMove: return "InvalidMove";
        case ErrorKind::InvalidAngle: return "InvalidAngle";
        case ErrorKind::InvalidFold: return "InvalidFold";
        case ErrorKind::InvalidPunch: return "InvalidPunch";
        case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorKind::GenerationFailed: return "GenerationFailed";
        case ErrorKind::MissingAsset: return "MissingAsset";
        case ErrorKind::Unsolvable: return "Unsolvable";
        case ErrorKind::EmptyGroup: return "EmptyGroup";
        case ErrorKind::UnsupportedVariant: return "UnsupportedVariant";
        case ErrorKind::Malformed: return "Malformed";
        case ErrorKind::Conflict: return "Conflict";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace mentes
