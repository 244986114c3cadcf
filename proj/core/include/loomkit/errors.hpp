#pragma once

#include <stdexcept>
#include <string>

namespace loomkit {

// Every failure the library can raise, one code per contract-level error.
// The CLI prints `<code-name>: <detail>` so scripts can grep on the prefix.
enum class ErrorCode {
    ZeroVector,
    PolarSingularity,
    OutOfBounds,
    BehindCamera,
    DegeneratePatch,
    ParallelRay,
    EdgeOnSurface,
    MissingRangePartials,
    TiltSingularity,
    NonPositiveRange,
    NonPositiveDt,
    NearZeroGroundTruth,
    NonPositiveLooming,
    ZeroTranslation,
    BadMagic,
    TruncatedFile,
    IoError,
    DimensionMismatch,
    BadThresholds,
    BadConfig,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::PolarSingularity: return "PolarSingularity";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::BehindCamera: return "BehindCamera";
        case ErrorCode::DegeneratePatch: return "DegeneratePatch";
        case ErrorCode::ParallelRay: return "ParallelRay";
        case ErrorCode::EdgeOnSurface: return "EdgeOnSurface";
        case ErrorCode::MissingRangePartials: return "MissingRangePartials";
        case ErrorCode::TiltSingularity: return "TiltSingularity";
        case ErrorCode::NonPositiveRange: return "NonPositiveRange";
        case ErrorCode::NonPositiveDt: return "NonPositiveDt";
        case ErrorCode::NearZeroGroundTruth: return "NearZeroGroundTruth";
        case ErrorCode::NonPositiveLooming: return "NonPositiveLooming";
        case ErrorCode::ZeroTranslation: return "ZeroTranslation";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::BadThresholds: return "BadThresholds";
        case ErrorCode::BadConfig: return "BadConfig";
    }
    return "UnknownError";
}

class LoomError : public std::runtime_error {
public:
    LoomError(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace loomkit
