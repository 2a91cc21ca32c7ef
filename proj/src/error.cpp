#include "nvsim/error.hpp"

namespace nvsim {

const char* errorCodeName(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::Misaligned: return "Misaligned";
        case ErrorCode::KeysUnavailable: return "KeysUnavailable";
        case ErrorCode::BadTransition: return "BadTransition";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::PageAbsent: return "PageAbsent";
        case ErrorCode::Disabled: return "Disabled";
        case ErrorCode::AlreadyResident: return "AlreadyResident";
        case ErrorCode::BadDistribution: return "BadDistribution";
        case ErrorCode::NonMonotonicFraction: return "NonMonotonicFraction";
        case ErrorCode::MismatchedBaseline: return "MismatchedBaseline";
        case ErrorCode::UnsupportedShape: return "UnsupportedShape";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace nvsim
