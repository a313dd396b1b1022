#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nullctl {

enum class ErrorCode {
    NonPositiveRealPart,
    DuplicateEntry,
    TooFewModes,
    TailBoundUnachievable,
    IllConditioned,
    InvalidSpan,
    DegenerateFamily,
    NotHermitian,
    SupportOverlap,
    UnobservableMode,
    UnobservableJordanBranch,
    ZeroMuUnsupported,
    DegenerateB,
    SynthesisUnsupported,
    GridTooCoarse,
    ObservationUnavailable,
    StructuralHypothesisMissing,
    NoJordanModes,
    NoProfileAvailable,
    InvalidArgument,
    InvalidConfig,
};

/// Machine-readable name, e.g. "UNOBSERVABLE_MODE".
std::string_view error_name(ErrorCode code) noexcept;

/// Numerical failures (conditioning, tails, grids) as opposed to invalid
/// models or inputs. The CLI maps these to different exit codes.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace nullctl
