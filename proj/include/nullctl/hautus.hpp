#pragma once

// Quantified Fattorini-Hautus inequality on witness vectors, and the T*
// lower bounds read off observations, eigenvalue gaps and Jordan data.

#include "nullctl/grushin.hpp"
#include "nullctl/models.hpp"
#include "nullctl/profile.hpp"

#include <map>
#include <string>
#include <vector>

namespace nullctl {

struct TestVector {
    cplx lambda{1, 0};
    double norm_y = 1;
    double norm_Ay = 0; ///< ||(A* + lambda) y||
    double norm_By = 0; ///< ||B* y||_U
};

/// C e^{2T Re l} (|Ay|^2/Re l^2 + |By|^2/Re l) / |y|^2; >= 1 when the inequality holds.
double inequality_ratio(const TestVector& tv, double T, double C);

/// Witness y = sqrt2 v_n(x1) sin(n pi x2) with control on (a,b) and its mirror.
TestVector grushin_test_vector(const CrossSectionMode& mode, double a, double b);

/// [-ln||B*phi_{k,1}|| + ln(Re l)/2] / Re l, clamped at 0, +inf for unobservable modes.
ProfileReport tstar_observation_profile(const ParabolicModel& model, std::size_t K, int window = default_window);

/// [-ln min_j |l_k - l_j| + ln Re l_k] / Re l_k; needs the model's pair-kernel rule.
ProfileReport tstar_gap_profile(const ParabolicModel& model, std::size_t K, int window = default_window);

struct JordanProfiles {
    ProfileReport mu;    ///< [-ln|mu_k| + ln Re l_k] / Re l_k
    ProfileReport gamma; ///< [ln(|gamma_k|/|mu_k|) + ln Re l_k] / Re l_k, empty without gamma
};

/// Throws NoJordanModes.
JordanProfiles tstar_jordan_profile(const ParabolicModel& model, std::size_t K, int window = default_window);

struct TstarEstimate {
    double lower = 0;
    std::map<std::string, double> components;
    std::vector<std::string> notes;
};

/// Max of the tails of every applicable profile. Throws NoProfileAvailable.
TstarEstimate tstar_estimate(const ParabolicModel& model, std::size_t K, int window = default_window);

} // namespace nullctl
