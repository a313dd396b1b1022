#pragma once

// Biorthogonal families to (generalized) exponentials t^a e^{-lambda t} on
// (0, T). Dual functions are kept as coefficients over the exponential
// basis so every later integral has a closed form.

#include "nullctl/linalg.hpp"
#include "nullctl/spectral.hpp"
#include "nullctl/xprec.hpp"

#include <optional>
#include <vector>

namespace nullctl {

/// Rate of an entry in extended precision, including sub-ulp offsets.
xcomplex extended_rate(const SpectralEntry& e);

struct ExponentialSpan {
    std::vector<xcomplex> rates;
    std::vector<int> chain;        ///< 1: e^{-lt}; 2: also t e^{-lt}
    std::optional<double> horizon; ///< empty means T = infinity

    /// Validates distinct rates with Re > 0 and T > 0. Throws InvalidSpan.
    static ExponentialSpan from_extended(std::vector<xcomplex> rates, std::optional<double> T, bool jordan = false);
    static ExponentialSpan make(const std::vector<cplx>& rates, std::optional<double> T, bool jordan = false);
    static ExponentialSpan mixed(std::vector<xcomplex> rates, std::vector<int> chain, std::optional<double> T);

    bool jordan() const;
    std::size_t dim() const;

    struct BasisFn {
        std::size_t rate;
        int power; ///< a in t^a e^{-lambda t}
    };
    std::vector<BasisFn> basis() const;
    /// Index of the first basis function of rate r.
    std::size_t offset_of(std::size_t r) const;
};

/// int_0^T t^a e^{-s t} dt (T empty means infinity).
xcomplex moment_integral(const xcomplex& s, int a, std::optional<double> T);

/// G_ij = int conj(b_i) b_j in extended precision.
Matrix<xcomplex> exp_gram_x(const ExponentialSpan& span);
Matrix<cplx> exp_gram(const ExponentialSpan& span);

struct BiorthogonalFamily {
    ExponentialSpan span;
    /// Row k holds q_k over the span basis: q_k = sum_j C_kj b_j.
    Matrix<xcomplex> coeffs;
    Matrix<xcomplex> gram;
    double cond_estimate = 0;
    std::vector<double> norms; ///< ||q_k|| in L2(0,T)
    double residual = 0;       ///< max |<b_j, q_k> - delta_jk|
    double norm_consistency = 0;
    bool degraded = false;
    Precision precision = Precision::Standard;
};

inline constexpr double default_residual_threshold = 1e-8;

/// Solves G c = e_k for all k. Throws IllConditioned.
BiorthogonalFamily build_biortho(const ExponentialSpan& span, Precision precision = Precision::Standard);

/// Same over the doubled basis {e^{-lt}, t e^{-lt}}; span.jordan() required.
BiorthogonalFamily build_biortho_jordan(const ExponentialSpan& span, Precision precision = Precision::Standard);

struct NormGrowthFit {
    bool degenerate = false;
    double slope = 0;
    double bound = 0; ///< c_est, or 4 c_est when the span carries Jordan chains
    double slack = 0;
    bool consistent = false;
    std::size_t points = 0;
};

/// Slope of ln||q_k|| against Re(lambda_k) over the last `window` rates.
NormGrowthFit norm_growth_fit(const BiorthogonalFamily& family, double c_est, int window = default_window,
                              double slack = 0.1);

/// Closed-form inverse of the T = infinity Gram 1/(conj(l_i) + l_j).
Matrix<xcomplex> cauchy_inverse_oracle(const std::vector<xcomplex>& rates);

/// int_0^T t^a e^{-mu t} conj(q_k(t)) dt for each k.
std::vector<xcomplex> pair_with_exponential(const BiorthogonalFamily& family, const xcomplex& mu, int a);

/// ||f||^2 for f = sum_k w_k q_k.
xreal combination_norm2(const BiorthogonalFamily& family, const std::vector<xcomplex>& w);

/// q_k(t) for plotting.
cplx evaluate_dual(const BiorthogonalFamily& family, std::size_t k, double t);

} // namespace nullctl
