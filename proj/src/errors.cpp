#include "qplab/errors.hpp"

namespace qplab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorCode::RationalInput: return "RationalInput";
        case ErrorCode::InsufficientDepth: return "InsufficientDepth";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::ScheduleInvalid: return "ScheduleInvalid";
        case ErrorCode::WindowEmpty: return "WindowEmpty";
        case ErrorCode::OverflowPolicyExceeded: return "OverflowPolicyExceeded";
        case ErrorCode::NotInUnitInterval: return "NotInUnitInterval";
        case ErrorCode::CombinatorialBudget: return "CombinatorialBudget";
        case ErrorCode::SingularInverse: return "SingularInverse";
        case ErrorCode::HorizonTooLarge: return "HorizonTooLarge";
        case ErrorCode::TraceTooShort: return "TraceTooShort";
        case ErrorCode::ZeroCrossingUnresolvable: return "ZeroCrossingUnresolvable";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ValueError: return "ValueError";
        case ErrorCode::CriterionUnknown: return "CriterionUnknown";
    }
    return "Unknown";
}

}  // namespace qplab
