#pragma once

// Moment-method null controls: u(t) = sum_terms coeff q_basis(T - t) direction,
// with q a biorthogonal family to the exponentials of the controlled modes.

#include "nullctl/biortho_time.hpp"
#include "nullctl/models.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace nullctl {

/// -e^{-lambda_k T} <y0, phi_{k,branch}>.
cplx moment_rhs(const ParabolicModel& model, double T, long k, int branch);

struct ControlTerm {
    std::size_t mode = 0;  ///< index into ControlPlan::modes
    std::size_t basis = 0; ///< time profile q_basis of the family
    ObservationVector direction;
    cplx coeff{0, 0};
};

struct ControlPlan {
    double T = 0;
    std::vector<SpectralMode> modes;
    std::vector<ControlTerm> terms;
    std::vector<double> per_mode_norm;
    double total_norm = 0;
    double triangle_bound = 0; ///< sum |coeff| ||q|| ||direction||
    double solver_residual = 0;
    std::shared_ptr<const BiorthogonalFamily> family;
    std::vector<double> spatial_sigma;    ///< per mode, 0 for simple and Jordan modes
    std::vector<double> spatial_bound;    ///< sqrt(r)/sigma, 0 when not applicable
    std::vector<double> spatial_max_norm; ///< max ||Psi_{k,i}||
    std::string name;

    std::size_t N() const { return modes.size(); }
    /// u(t) components: the scalar value, or sine coefficients on omega.
    std::vector<cplx> sample(double t) const;
    /// sample() on t_i = T i / (n - 1), far cheaper than n separate calls.
    std::vector<std::vector<cplx>> sample_uniform(std::size_t n) const;
};

/// All modes Simple with nonzero observations. Throws UnobservableMode, IllConditioned.
ControlPlan synthesize_simple(const ParabolicModel& model, double T, std::size_t N,
                              Precision precision = Precision::Extended);

/// Simple or Multiple modes. Throws DegenerateFamily.
ControlPlan synthesize_multiple(const ParabolicModel& model, double T, std::size_t N,
                                Precision precision = Precision::Extended);

/// Jordan chains (mu_k = 0 chains are handled as double eigenvalues).
/// Throws UnobservableJordanBranch, StructuralHypothesisMissing, ZeroMuUnsupported.
ControlPlan synthesize_jordan(const ParabolicModel& model, double T, std::size_t N,
                              Precision precision = Precision::Extended);

/// Any mix of the above.
ControlPlan synthesize(const ParabolicModel& model, double T, std::size_t N,
                       Precision precision = Precision::Extended);

struct MomentResidual {
    long k = 0;
    int branch = 0;
    cplx value{0, 0};
};

struct MomentResidualReport {
    std::vector<MomentResidual> residuals;
    double max_abs = 0;        ///< over the controlled modes
    double max_abs_beyond = 0; ///< over checked modes past N (leakage)
    double tail_bound = 0;     ///< sum_{k>N} e^{-Re l_k T} sum_i |<y0, phi_{k,i}>|
};

MomentResidualReport verify_moments(const ControlPlan& plan, const ParabolicModel& model, double T,
                                    std::size_t N_check);

/// <y(T), phi_{k,i}> for k <= K, flattened over (k, branch).
std::vector<cplx> terminal_projection(const ControlPlan& plan, const ParabolicModel& model, double T,
                                      std::size_t K);

struct GramianControl {
    std::array<std::array<double, 2>, 2> Q{};
    double det = 0, trace = 0, sigma = 0;
    bool sigma_bounds_ok = false; ///< det/tr <= sigma <= 2 det/tr
    std::array<double, 2> z{};    ///< Q^{-1} e^{AT} y0
    double norm2 = 0;             ///< ||u||^2 = <Q^{-1} e^{AT} y0, e^{AT} y0>
    double bound_fit = 0;         ///< ||u||^2 / ((l1 + l2) e^{-2 l1 T} |y0|^2)
    std::vector<double> t, u;

    double control(const Block2x2& b, double T, double time) const;
};

/// eta(s) = (e^s - 1)/s, 1 at s = 0.
double eta(double s);

GramianControl gramian_control_2x2(const Block2x2& block, std::array<double, 2> y0, double T,
                                   std::size_t samples = 2000);

/// y' = -diag(l) y + b u(t) by classical RK4.
std::array<double, 2> rk4_terminal(const Block2x2& block, const GramianControl& g, std::array<double, 2> y0,
                                   double T, double h = 1e-4);

} // namespace nullctl
