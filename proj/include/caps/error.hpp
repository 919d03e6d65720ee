#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace caps {

enum class ErrorCode {
    WindowTooSmall,
    StepTooCoarse,
    GridMismatch,
    NonConvergent,
    InvalidRegime,
    VanishingProbability,
    NotNormalized,
    InvalidArgument,
    Usage,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Numerical failures are invariant violations in the simulation itself,
    // as opposed to bad input or the filesystem.
    bool is_numerical() const noexcept {
        return code_ == ErrorCode::NonConvergent || code_ == ErrorCode::VanishingProbability ||
               code_ == ErrorCode::NotNormalized;
    }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::VanishingProbability: return "VanishingProbability";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Usage: return "UsageError";
    case ErrorCode::Io: return "IoError";
    }
    return "Unknown";
}

} // namespace caps
