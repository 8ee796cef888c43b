#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pairs {

/// Failure categories surfaced by every module. The CLI maps them onto exit
/// codes (2 validation, 3 numerical degeneracy, 4 I/O).
enum class ErrorCode {
    Parse,
    Validation,
    InsufficientOverlap,
    Alignment,
    Coverage,
    UnknownSubset,
    Degenerate,
    Singular,
    NoCointegration,
    OptimizationDegenerate,
    Io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Validation: return "validation";
        case ErrorCode::InsufficientOverlap: return "insufficient_overlap";
        case ErrorCode::Alignment: return "alignment";
        case ErrorCode::Coverage: return "coverage";
        case ErrorCode::UnknownSubset: return "unknown_subset";
        case ErrorCode::Degenerate: return "degenerate";
        case ErrorCode::Singular: return "singular";
        case ErrorCode::NoCointegration: return "no_cointegration";
        case ErrorCode::OptimizationDegenerate: return "optimization_degenerate";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

inline int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::Degenerate:
        case ErrorCode::Singular:
        case ErrorCode::NoCointegration:
        case ErrorCode::OptimizationDegenerate:
            return 3;
        case ErrorCode::Io:
            return 4;
        default:
            return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace pairs
