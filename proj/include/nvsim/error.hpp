#ifndef NVSIM_ERROR_HPP
#define NVSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nvsim {

enum class ErrorCode {
    MalformedLine,
    InvalidParams,
    Misaligned,
    KeysUnavailable,
    BadTransition,
    OutOfRange,
    PageAbsent,
    Disabled,
    AlreadyResident,
    BadDistribution,
    NonMonotonicFraction,
    MismatchedBaseline,
    UnsupportedShape,
    UnknownKey,
    IoError,
};

/// All recoverable failures surface as SimError; the code selects the
/// CLI exit status (validation vs. internal).
class SimError : public std::runtime_error {
  public:
    SimError(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

const char* errorCodeName(ErrorCode code);

} // namespace nvsim

#endif
