#pragma once
#include <stdexcept>
#include <string>

namespace pinball {

enum class ErrorCode {
    BackendMismatch,
    InvalidGeometry,
    OutOfDomain,
    DegenerateContact,
    NonRationalIntersection,
    AmbiguousRoot,
    SimultaneousContact,
    BallStopped,
    ExcludedOffset,
    InvalidGadgetParams,
    InvalidScene,
    InvalidConfig,
    VerificationFailure,
    CompileError,
    OracleHalt,
    ParseError,
    DecodeAmbiguous,
    DomainError,
};

const char* error_code_name(ErrorCode c);

class PinballError : public std::runtime_error {
public:
    PinballError(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
          code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw PinballError(code, msg);
}

} // namespace pinball
