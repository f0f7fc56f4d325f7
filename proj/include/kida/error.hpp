#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kida {

enum class ErrorCode {
    NotAUnit,
    ZeroInput,
    Overflow,
    InvalidArgument,
    ParseError,
    PrecisionExceeded,
    BadReduction,
    BoundExceeded,
    RamifiedLevel,
    MissingCoefficient,
    SubgroupMismatch,
    GenericUnsupported,
    IncoherentGenericData,
    NotASubfield,
    NotPPower,
    NotCyclic,
    AmbiguousSubgroup,
    MuNonzero,
    MissingLocalType,
    ChainMismatch,
    InternalAdditivityViolation,
    MismatchedInputs,
    IncompleteTwistData,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::PrecisionExceeded: return "PrecisionExceeded";
    case ErrorCode::BadReduction: return "BadReduction";
    case ErrorCode::BoundExceeded: return "BoundExceeded";
    case ErrorCode::RamifiedLevel: return "RamifiedLevel";
    case ErrorCode::MissingCoefficient: return "MissingCoefficient";
    case ErrorCode::SubgroupMismatch: return "SubgroupMismatch";
    case ErrorCode::GenericUnsupported: return "GenericUnsupported";
    case ErrorCode::IncoherentGenericData: return "IncoherentGenericData";
    case ErrorCode::NotASubfield: return "NotASubfield";
    case ErrorCode::NotPPower: return "NotPPower";
    case ErrorCode::NotCyclic: return "NotCyclic";
    case ErrorCode::AmbiguousSubgroup: return "AmbiguousSubgroup";
    case ErrorCode::MuNonzero: return "MuNonzero";
    case ErrorCode::MissingLocalType: return "MissingLocalType";
    case ErrorCode::ChainMismatch: return "ChainMismatch";
    case ErrorCode::InternalAdditivityViolation: return "InternalAdditivityViolation";
    case ErrorCode::MismatchedInputs: return "MismatchedInputs";
    case ErrorCode::IncompleteTwistData: return "IncompleteTwistData";
    }
    return "Unknown";
}

/// Every failure in the library is reported through this one exception type;
/// callers (the CLI in particular) switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace kida
