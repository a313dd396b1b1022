#pragma once

// Ground state of -v'' + (n pi)^2 x^2 v on (-1, 1), Dirichlet, by finite
// differences; its mass on (a, b) drives the minimal time a^2/2.

#include "nullctl/profile.hpp"

#include <vector>

namespace nullctl {

inline constexpr double default_grushin_h = 2e-4;

struct CrossSectionMode {
    long n = 0;
    double lambda = 0;
    double h = 0;
    std::vector<double> x;     ///< interior nodes -1 + i h
    std::vector<double> v;     ///< L2-normalized, positive
    std::vector<double> log_v; ///< ln v from the inward ratio recurrence, finite everywhere
    double richardson_rel = 0; ///< |lambda(h) - lambda(h/2)| / lambda
};

/// Throws GridTooCoarse when the Richardson estimate exceeds 1e-4 lambda,
/// InvalidArgument for h > 1e-3 or n < 1.
CrossSectionMode solve_mode(long n, double h = default_grushin_h);

/// Smallest eigenvalue of the discretized operator only.
double smallest_eigenvalue_fd(long n, double h);

/// ln int_a^b v^2, trapezoid in the log domain (-inf when a == b).
double log_observation_integral(const CrossSectionMode& mode, double a, double b);

/// int_a^b v^2 through the log-domain path (0 once it underflows).
double observation_integral(const CrossSectionMode& mode, double a, double b);

/// Plain trapezoid of the inverse-iteration samples v^2; reliable only where v^2 >> 1e-16.
double observation_integral_direct(const CrossSectionMode& mode, double a, double b);

/// T_n = [-ln(2 int_a^b v_n^2) + ln lambda_n] / (2 lambda_n).
double grushin_tn(const CrossSectionMode& mode, double a, double b);

/// Profile over n in [n_lo, n_hi]; re_lambda holds lambda_n.
ProfileReport grushin_tstar_profile(double a, double b, long n_lo, long n_hi, double h = default_grushin_h,
                                    int window = default_window,
                                    double cap = std::numeric_limits<double>::infinity());

} // namespace nullctl
