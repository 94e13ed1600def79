#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qplab {

enum class ErrorCode {
    PrecisionExhausted,
    RationalInput,
    InsufficientDepth,
    DomainError,
    ScheduleInvalid,
    WindowEmpty,
    OverflowPolicyExceeded,
    NotInUnitInterval,
    CombinatorialBudget,
    SingularInverse,
    HorizonTooLarge,
    TraceTooShort,
    ZeroCrossingUnresolvable,
    SchemaError,
    ValueError,
    CriterionUnknown,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace qplab
