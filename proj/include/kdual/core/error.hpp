#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kdual {

enum class ErrorCode {
    NonRationalVertex,
    InconsistentGluing,
    ZeroDimensionalFace,
    ResolutionTooCoarse,
    PointOffFace,
    TieOnRegion,
    TruncationExhausted,
    DimensionMismatch,
    MissingLevel,
    WindowNotConverged,
    EmptyGrid,
    GridMismatch,
    NotConverged,
    SizeCapExceeded,
    InfeasibleMarginals,
    NoPlanAvailable,
    TruncationInsufficient,
    NotReflexive,
    InvariantViolation,
    SeriesDepthExceeded,
    ValueOutOfRange,
    ConfigError,
    IncompleteRun,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonRationalVertex: return "NonRationalVertex";
        case ErrorCode::InconsistentGluing: return "InconsistentGluing";
        case ErrorCode::ZeroDimensionalFace: return "ZeroDimensionalFace";
        case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorCode::PointOffFace: return "PointOffFace";
        case ErrorCode::TieOnRegion: return "TieOnRegion";
        case ErrorCode::TruncationExhausted: return "TruncationExhausted";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MissingLevel: return "MissingLevel";
        case ErrorCode::WindowNotConverged: return "WindowNotConverged";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
        case ErrorCode::InfeasibleMarginals: return "InfeasibleMarginals";
        case ErrorCode::NoPlanAvailable: return "NoPlanAvailable";
        case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
        case ErrorCode::NotReflexive: return "NotReflexive";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::SeriesDepthExceeded: return "SeriesDepthExceeded";
        case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IncompleteRun: return "IncompleteRun";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) fail(code, what);
}

}  // namespace kdual
