#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace nullctl {

/// Finite surrogate for a limsup: the per-index values, their running
/// supremum and the sup over the last `window` entries.
struct ProfileReport {
    std::vector<long> k;
    std::vector<double> value;
    std::vector<double> running_sup;
    std::vector<double> re_lambda; ///< empty when not meaningful
    std::vector<long> partner;     ///< argmin partner index (Bohr profile)
    double tail_estimate = 0;
    int window = 10;
    bool unbounded = false; ///< running sup exceeded the configured cap
    std::vector<std::string> notes;

    std::size_t size() const { return k.size(); }
};

inline constexpr int default_window = 10;

/// Fills running_sup and tail_estimate. Entries equal to +inf propagate.
/// `cap` marks the report unbounded once the running sup exceeds it.
ProfileReport make_profile(std::vector<long> k, std::vector<double> value, int window = default_window,
                           double cap = std::numeric_limits<double>::infinity());

/// Sup of the values whose index lies in [k_lo, k_hi].
double window_sup(const ProfileReport& p, long k_lo, long k_hi);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace nullctl
