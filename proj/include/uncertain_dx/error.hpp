#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace udx {

enum class ErrorCode {
    // Input and validation failures (CLI exit code 2).
    ParseError,
    ValidationError,
    UnknownObservation,
    DuplicateObservation,
    UnmappedDisease,
    NonpositiveValueOfLife,
    MissingTrueDiagnosis,
    MissingGoldStandard,
    MissingRatings,
    InvalidArgument,
    // Inference failures (CLI exit code 3).
    AllHypothesesRuledOut,
    DegeneratePrior,
    ZeroMarginal,
    EmptyEvidence,
    InternalConsistency,
};

[[nodiscard]] std::string_view error_name(ErrorCode code) noexcept;

/// True for failures raised while running an inference method on valid input.
[[nodiscard]] bool is_inference_error(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace udx
