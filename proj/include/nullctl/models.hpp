#pragma once

// Concrete parabolic systems as spectral data: eigenvalues, Jordan
// structure, observations B*phi_{k,i} with their U inner products, and the
// closed-form minimal-time profiles where one is known.

#include "nullctl/profile.hpp"
#include "nullctl/spectral.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nullctl {

/// int_a^b 2 sin(m pi x) sin(n pi x) dx.
double sine_product_integral(long m, long n, double a, double b);

/// Piecewise-constant function on (0, 1): value[i] on (breaks[i], breaks[i+1]).
struct PiecewiseConstant {
    std::vector<double> breaks;
    std::vector<double> values;

    /// Requires 0 = breaks[0] < ... < breaks.back() = 1. Throws InvalidArgument.
    static PiecewiseConstant make(std::vector<double> breaks, std::vector<double> values);
    /// q = value on (a, b), 0 elsewhere.
    static PiecewiseConstant indicator(double a, double b, double value = 1);

    bool identically_zero() const;
    /// Length of {q != 0} inside (a, b).
    double support_overlap(double a, double b) const;
    /// int_lo^hi q phi_m phi_n with phi_k = sqrt2 sin(k pi x).
    double weighted_product(long m, long n, double lo = 0, double hi = 1) const;
    double operator()(double x) const;
};

/// Element of the control space U: a scalar, or a sine series restricted to
/// an interval omega = (a, b).
class ObservationVector {
public:
    enum class Kind { Scalar, SineSeries, Unavailable };

    ObservationVector() = default;
    static ObservationVector scalar(cplx value);
    /// coeffs[m-1] multiplies sqrt2 sin(m pi x) on (a, b).
    static ObservationVector sine_series(std::vector<cplx> coeffs, double a, double b);
    static ObservationVector unavailable();

    Kind kind() const { return kind_; }
    cplx value() const { return value_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    std::pair<double, double> interval() const { return {a_, b_}; }

    /// <this, other>_U, linear in the first argument. Throws
    /// ObservationUnavailable, InvalidArgument on mixed representations.
    cplx inner_product(const ObservationVector& other) const;
    double norm() const;
    bool is_zero() const;

    ObservationVector operator*(cplx s) const;
    ObservationVector operator+(const ObservationVector& o) const;
    cplx evaluate(double x) const;

private:
    Kind kind_ = Kind::Scalar;
    cplx value_{0, 0};
    std::vector<cplx> coeffs_;
    double a_ = 0, b_ = 1;
};

inline constexpr double vanishing_observation = 1e-13;

enum class ModeKind { Simple, Multiple, Jordan2 };

struct SpectralMode {
    long k = 0; ///< 1-based position in normal order
    SpectralEntry lambda;
    ModeKind kind = ModeKind::Simple;
    /// Simple: one; Multiple: r; Jordan2: (B*phi_{k,1}, B*phi_{k,2}).
    std::vector<ObservationVector> obs;
    cplx mu{0, 0};
    std::optional<cplx> gamma; ///< B*phi_{k,2} = gamma B*phi_{k,1}
    std::vector<cplx> y0;      ///< <y0, phi_{k,i}> per branch

    std::size_t branches() const { return obs.size(); }
};

/// <y0, phi_{k,i}> for mode k (1-based) and branch i (0-based).
using InitialData = std::function<cplx(long k, int branch)>;

/// Coefficients (a, b) with a phi_k + b phi_j in Ker B*, or empty.
using PairKernelRule = std::function<std::optional<std::array<cplx, 2>>(const SpectralMode&, const SpectralMode&)>;

struct TminRule {
    std::string description;
    std::function<ProfileReport(std::size_t K, int window)> profile;
};

class ParabolicModel {
public:
    using ModeMaker = std::function<SpectralMode(const SpectralEntry&, long k)>;

    /// Any model given by a spectral rule and a per-entry mode builder.
    static ParabolicModel custom(std::string name, std::shared_ptr<const SequenceRule> rule, ModeMaker make);

    const std::string& name() const { return name_; }
    const SpectralSequence& spectrum() const { return seq_; }

    /// First K modes, initial coefficients filled in.
    std::vector<SpectralMode> modes(std::size_t K) const;
    SpectralMode mode(long k) const;

    ParabolicModel with_initial(InitialData y0) const;
    const InitialData& initial() const { return initial_; }

    std::optional<TminRule> tmin;
    PairKernelRule pair_kernel;
    bool synthesis_supported = true;
    bool approx_controllable = true;
    std::vector<std::string> notes;
    std::vector<std::string> warnings;

private:
    struct Cache;
    std::string name_;
    SpectralSequence seq_;
    ModeMaker make_;
    InitialData initial_;
    std::shared_ptr<Cache> cache_;
};

/// a phi_k + b phi_j with a = B*phi_j, b = -B*phi_k; valid whenever U is scalar.
PairKernelRule scalar_pair_kernel();

ParabolicModel pointwise_heat(double x0);

/// Per-mode data of the internal cascade with coupling q.
struct CascadeModeData {
    long k = 0;
    double I = 0;  ///< int q phi_k^2
    double I1 = 0; ///< int_0^a q phi_k^2
    std::vector<double> psi; ///< psi_hat_m, m = 1..M (psi_hat_k = 0)
    double psi_tail2 = 0;    ///< bound on sum_{m>M} psi_hat_m^2
    double g_hat_k = 0;      ///< solvability term <(I - q) phi_k, phi_k>
    double tau = 0;          ///< L2(omega) projection of psi_k on phi_k
    double xi_norm = 0;      ///< ||psi_k - tau phi_k||_{L2(omega)}
};

inline constexpr long default_psi_modes = 200;

CascadeModeData cascade_mode_data(const PiecewiseConstant& q, double a, double b, long k,
                                  long M = default_psi_modes);

/// Distributed control on omega = (a, b), coupling q away from omega.
ParabolicModel cascade_internal_q(const PiecewiseConstant& q, double a, double b, long M = default_psi_modes);

struct BoundaryDerivative {
    double value = 0; ///< psi_k'(0) from the truncated expansion
    double tail = 0;  ///< bound on the neglected part
};
BoundaryDerivative cascade_psi_prime0(const PiecewiseConstant& q, long k, long M = default_psi_modes);

/// Boundary control of the first component; Jordan chains with mu_k = I_k(q).
ParabolicModel cascade_boundary_q(const PiecewiseConstant& q, long M = default_psi_modes);

/// Returns "RATIONAL_ROOT_WARNING" details when sqrt(d) is close to p/q, q <= 50.
std::optional<std::string> rational_root_warning(double d);

ParabolicModel two_diffusion_boundary(double d);
ParabolicModel two_diffusion_pointwise(double d, double x0);

/// Lambda = {k^2 pi^2 -+ e^{-tau k^2 pi^2}}.
ParabolicModel academic_lf(double tau);

/// lambda_k = 2k - 1, observations unavailable.
ParabolicModel harmonic_oscillator();

/// Two-mode finite block y' = -diag(l1, l2) y + b u.
struct Block2x2 {
    double lambda1 = 1, lambda2 = 2;
    double b1 = 1, b2 = 1;

    /// Throws InvalidArgument unless 0 < l1 < l2, DegenerateB if b1 b2 = 0.
    static Block2x2 make(double lambda1, double lambda2, double b1, double b2);
};

} // namespace nullctl
