#include "uncertain_dx/error.hpp"

namespace udx {

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnknownObservation: return "UnknownObservation";
        case ErrorCode::DuplicateObservation: return "DuplicateObservation";
        case ErrorCode::UnmappedDisease: return "UnmappedDisease";
        case ErrorCode::NonpositiveValueOfLife: return "NonpositiveValueOfLife";
        case ErrorCode::MissingTrueDiagnosis: return "MissingTrueDiagnosis";
        case ErrorCode::MissingGoldStandard: return "MissingGoldStandard";
        case ErrorCode::MissingRatings: return "MissingRatings";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::AllHypothesesRuledOut: return "AllHypothesesRuledOut";
        case ErrorCode::DegeneratePrior: return "DegeneratePrior";
        case ErrorCode::ZeroMarginal: return "ZeroMarginal";
        case ErrorCode::EmptyEvidence: return "EmptyEvidence";
        case ErrorCode::InternalConsistency: return "InternalConsistency";
    }
    return "Unknown";
}

bool is_inference_error(ErrorCode code) noexcept
{
    switch (code) {
        case ErrorCode::AllHypothesesRuledOut:
        case ErrorCode::DegeneratePrior:
        case ErrorCode::ZeroMarginal:
        case ErrorCode::EmptyEvidence:
        case ErrorCode::InternalConsistency:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message)
    , code_(code)
{}

}  // namespace udx
