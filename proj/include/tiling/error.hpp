#pragma once

#include <stdexcept>
#include <string>

namespace tiling {

enum class ErrorKind {
    NotSquarefree,
    Overflow,
    NotCoprime,
    NonResidue,
    ZeroArgument,
    DimensionMismatch,
    RaggedLayout,
    UnsupportedPrime,
    Undecided,
    TooLarge,
    RankMismatch,
    MissingTernary,
    PositiveDiscriminant,
    NotFound,
    BetaAmbiguous,
    HypothesisFailed,
    InternalDisagreement,
    ExcludedSmallN,
};

inline const char *to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NotSquarefree: return "NotSquarefree";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::NonResidue: return "NonResidue";
    case ErrorKind::ZeroArgument: return "ZeroArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RaggedLayout: return "RaggedLayout";
    case ErrorKind::UnsupportedPrime: return "UnsupportedPrime";
    case ErrorKind::Undecided: return "Undecided";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::MissingTernary: return "MissingTernary";
    case ErrorKind::PositiveDiscriminant: return "PositiveDiscriminant";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::BetaAmbiguous: return "BetaAmbiguous";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::InternalDisagreement: return "InternalDisagreement";
    case ErrorKind::ExcludedSmallN: return "ExcludedSmallN";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind)
    {
    }
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace tiling
