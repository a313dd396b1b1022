#include "nullctl/error.hpp"

namespace nullctl {

std::string_view error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonPositiveRealPart: return "NON_POSITIVE_REAL_PART";
    case ErrorCode::DuplicateEntry: return "DUPLICATE_ENTRY";
    case ErrorCode::TooFewModes: return "TOO_FEW_MODES";
    case ErrorCode::TailBoundUnachievable: return "TAIL_BOUND_UNACHIEVABLE";
    case ErrorCode::IllConditioned: return "ILL_CONDITIONED";
    case ErrorCode::InvalidSpan: return "INVALID_SPAN";
    case ErrorCode::DegenerateFamily: return "DEGENERATE_FAMILY";
    case ErrorCode::NotHermitian: return "NOT_HERMITIAN";
    case ErrorCode::SupportOverlap: return "SUPPORT_OVERLAP";
    case ErrorCode::UnobservableMode: return "UNOBSERVABLE_MODE";
    case ErrorCode::UnobservableJordanBranch: return "UNOBSERVABLE_JORDAN_BRANCH";
    case ErrorCode::ZeroMuUnsupported: return "ZERO_MU_UNSUPPORTED";
    case ErrorCode::DegenerateB: return "DEGENERATE_B";
    case ErrorCode::SynthesisUnsupported: return "SYNTHESIS_UNSUPPORTED";
    case ErrorCode::GridTooCoarse: return "GRID_TOO_COARSE";
    case ErrorCode::ObservationUnavailable: return "OBSERVATION_UNAVAILABLE";
    case ErrorCode::StructuralHypothesisMissing: return "STRUCTURAL_HYPOTHESIS_MISSING";
    case ErrorCode::NoJordanModes: return "NO_JORDAN_MODES";
    case ErrorCode::NoProfileAvailable: return "NO_PROFILE_AVAILABLE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    }
    return "UNKNOWN";
}

bool is_numerical(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::TailBoundUnachievable:
    case ErrorCode::IllConditioned:
    case ErrorCode::GridTooCoarse:
        return true;
    default:
        return false;
    }
}

} // namespace nullctl
