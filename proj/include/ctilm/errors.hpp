#pragma once

#include <stdexcept>
#include <string>

namespace ctilm {

enum class ErrorCode {
    // kernels
    ZeroDistanceWithPowerLaw,
    MissingMatrix,
    NegativeCovariate,
    // networks
    BetaOutOfRange,
    MissingLocations,
    Io,
    // epidemic
    InconsistentDimensions,
    OrderingViolation,
    DuplicateId,
    NoInfected,
    // likelihood
    DimensionMismatch,
    InvalidHistory,
    // mcmc
    WrongDatatype,
    InvalidConfig,
    InitializationError,
    // posterior
    EmptyWindow,
    SingleChain,
    NotSampled,
};

const char* error_code_name(ErrorCode code);

// Thrown by all modules. code() drives the CLI exit status: configuration and
// input-validation failures exit 1, numeric failures at run time exit 2.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code), message_(message) {}

    ErrorCode code() const { return code_; }
    const std::string& message() const { return message_; }

    // true for failures that arise from the numerics of an otherwise valid run
    bool runtime_numeric() const {
        return code_ == ErrorCode::InitializationError || code_ == ErrorCode::NoInfected;
    }

private:
    ErrorCode code_;
    std::string message_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ZeroDistanceWithPowerLaw: return "ZeroDistanceWithPowerLaw";
        case ErrorCode::MissingMatrix: return "MissingMatrix";
        case ErrorCode::NegativeCovariate: return "NegativeCovariate";
        case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
        case ErrorCode::MissingLocations: return "MissingLocations";
        case ErrorCode::Io: return "Io";
        case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
        case ErrorCode::OrderingViolation: return "OrderingViolation";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::NoInfected: return "NoInfected";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidHistory: return "InvalidHistory";
        case ErrorCode::WrongDatatype: return "WrongDatatype";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InitializationError: return "InitializationError";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::SingleChain: return "SingleChain";
        case ErrorCode::NotSampled: return "NotSampled";
    }
    return "Unknown";
}

} // namespace ctilm
