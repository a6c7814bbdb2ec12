#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semifield {

enum class Errc {
    NotPrime,
    ReducibleModulus,
    DegreeMismatch,
    DivisionByZero,
    IndexOutOfRange,
    NotADivisor,
    ZeroArgument,
    OrderNotDividing,
    OrderTooLarge,
    CharTwoUnsupported,
    EmbeddingFailure,
    DimensionMismatch,
    KernelMismatch,
    NotDirectSum,
    Incompatible,
    InvalidL,
    InvalidMu,
    InvalidParams,
    PolynomialHasRoot,
    SigmaOutOfRange,
    RInPowerSubgroup,
    ConditionViolated,
    WrongFamily,
    InvalidTransformParams,
    SingularLeftMultiplication,
    CertificationFailed,
    LemmaMismatch,
    UnsupportedBranch,
    InternalMismatch,
};

constexpr std::string_view to_string(Errc e) {
    switch (e) {
        case Errc::NotPrime: return "NotPrime";
        case Errc::ReducibleModulus: return "ReducibleModulus";
        case Errc::DegreeMismatch: return "DegreeMismatch";
        case Errc::DivisionByZero: return "DivisionByZero";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::NotADivisor: return "NotADivisor";
        case Errc::ZeroArgument: return "ZeroArgument";
        case Errc::OrderNotDividing: return "OrderNotDividing";
        case Errc::OrderTooLarge: return "OrderTooLarge";
        case Errc::CharTwoUnsupported: return "CharTwoUnsupported";
        case Errc::EmbeddingFailure: return "EmbeddingFailure";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::KernelMismatch: return "KernelMismatch";
        case Errc::NotDirectSum: return "NotDirectSum";
        case Errc::Incompatible: return "Incompatible";
        case Errc::InvalidL: return "InvalidL";
        case Errc::InvalidMu: return "InvalidMu";
        case Errc::InvalidParams: return "InvalidParams";
        case Errc::PolynomialHasRoot: return "PolynomialHasRoot";
        case Errc::SigmaOutOfRange: return "SigmaOutOfRange";
        case Errc::RInPowerSubgroup: return "RInPowerSubgroup";
        case Errc::ConditionViolated: return "ConditionViolated";
        case Errc::WrongFamily: return "WrongFamily";
        case Errc::InvalidTransformParams: return "InvalidTransformParams";
        case Errc::SingularLeftMultiplication: return "SingularLeftMultiplication";
        case Errc::CertificationFailed: return "CertificationFailed";
        case Errc::LemmaMismatch: return "LemmaMismatch";
        case Errc::UnsupportedBranch: return "UnsupportedBranch";
        case Errc::InternalMismatch: return "InternalMismatch";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace semifield
