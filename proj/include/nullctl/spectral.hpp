#pragma once

// Spectral sequences of parabolic operators and the indices measuring how
// their eigenvalues condense: ln|E'(lambda_k)|, the Bohr gap profile and the
// Blaschke product derivative.

#include "nullctl/profile.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace nullctl {

using cplx = std::complex<double>;

/// One eigenvalue. Values closer than double resolution are stored as
/// base + sign*exp(log_offset) so that gaps like exp(-900) stay exact.
struct SpectralEntry {
    cplx base{0, 0};
    double log_offset = -std::numeric_limits<double>::infinity();
    int offset_sign = 0; ///< -1, 0 (no offset) or +1
    int geom_mult = 1;
    std::optional<cplx> jordan_mu;
    int family = 0;
    long family_index = 0; ///< 1-based position inside its family

    static SpectralEntry plain(cplx lambda, int mult = 1);
    static SpectralEntry offset(double base, int sign, double log_offset);

    bool has_offset() const { return offset_sign != 0; }
    cplx value() const;
};

/// ln|a - b|, exact for entries sharing a base.
double log_gap(const SpectralEntry& a, const SpectralEntry& b);

/// Normal ordering: by modulus, ties by increasing argument.
bool normally_before(const SpectralEntry& a, const SpectralEntry& b);

/// lambda_k = c (k + shift)^p + sign * exp(log_offset(k)), k = 1, 2, ...
struct FamilyForm {
    double c = 1;
    double shift = 0;
    double p = 1;
    int sign = 0;
    std::function<double(long)> log_offset;
};

/// Generator for an infinite, normally ordered sequence.
class SequenceRule {
public:
    virtual ~SequenceRule() = default;
    virtual std::string name() const = 0;
    /// First `count` entries in normal order.
    virtual std::vector<SpectralEntry> first(std::size_t count) const = 0;
    /// Closed forms of each labelled family, used for analytic tail sums.
    /// Empty when unknown.
    virtual std::vector<FamilyForm> families() const { return {}; }
};

std::shared_ptr<const SequenceRule> power_rule(double c, double p);
std::shared_ptr<const SequenceRule> appendix_b_rule(double tau);
std::shared_ptr<const SequenceRule> two_diffusion_rule(double d, double scale);
std::shared_ptr<const SequenceRule> academic_lf_rule(double tau);
std::shared_ptr<const SequenceRule> harmonic_rule();

enum class Extent {
    Finite,    ///< the complete spectrum, E is a finite product
    Prefix,    ///< leading part of an infinite spectrum, tail from a power-law fit
    Generated, ///< infinite, produced lazily by a rule
};

class SpectralSequence {
public:
    SpectralSequence() = default;

    /// Validates invariants; entries must already be normally ordered.
    static SpectralSequence finite(std::vector<SpectralEntry> entries);
    static SpectralSequence prefix(std::vector<SpectralEntry> entries);
    static SpectralSequence generated(std::shared_ptr<const SequenceRule> rule);

    Extent extent() const { return extent_; }
    std::string describe() const;
    std::optional<double> sector_delta;

    /// Number of entries available without generation; max size_t for rules.
    std::size_t available() const;

    /// Snapshot holding at least min(count, available()) entries.
    std::shared_ptr<const std::vector<SpectralEntry>> entries(std::size_t count) const;

    SpectralEntry at(std::size_t index0) const;

    const SequenceRule* rule() const { return rule_.get(); }

    /// sum_{j>J} |lambda_j|^-m; infinite when not available.
    double tail_sum(std::size_t J, int m) const;

private:
    struct Cache {
        std::mutex mu;
        std::shared_ptr<const std::vector<SpectralEntry>> data;
    };
    Extent extent_ = Extent::Finite;
    std::shared_ptr<const SequenceRule> rule_;
    std::shared_ptr<Cache> cache_;
    // power-law fit |lambda_j| ~ c j^p for Prefix tails
    double fit_c_ = 0, fit_p_ = 0;
};

struct RawEigenvalue {
    cplx lambda;
    int mult = 1;
};

/// Sorts into normal order. Throws NonPositiveRealPart, DuplicateEntry.
SpectralSequence normal_order(const std::vector<RawEigenvalue>& raw);
SpectralSequence normal_order(std::vector<SpectralEntry> raw, Extent extent = Extent::Finite);

/// Throws on Re <= 0, misordering or coincident entries.
void validate_entries(const std::vector<SpectralEntry>& e);

struct HypothesisReport {
    double sector_delta_est = 0;
    double summability_exponent = 0;
    bool summable = false;
    int sup_rk = 0;
    std::vector<std::string> warnings;
};

inline constexpr double default_fit_tol = 0.05;

HypothesisReport check_hypotheses(const SpectralSequence& seq, std::size_t K, double fit_tol = default_fit_tol);

inline constexpr double default_rel_tail_tol = 1e-10;

/// ln|E'(lambda_k)|, k 1-based.
double log_E_prime(const SpectralSequence& seq, std::size_t k, double rel_tail_tol = default_rel_tail_tol);

/// ln|W'(lambda_k)| for the half-plane Blaschke product, k 1-based.
double blaschke_log_wprime(const SpectralSequence& seq, std::size_t k,
                           double rel_tail_tol = default_rel_tail_tol);

ProfileReport condensation_profile(const SpectralSequence& seq, std::size_t K,
                                   double rel_tail_tol = default_rel_tail_tol, int window = default_window);

ProfileReport blaschke_profile(const SpectralSequence& seq, std::size_t K,
                               double rel_tail_tol = default_rel_tail_tol, int window = default_window);

/// v_k = -ln min_{j!=k}|lambda_k - lambda_j| / Re(lambda_k), partner recorded (1-based).
ProfileReport bohr_profile(const SpectralSequence& seq, std::size_t K, int window = default_window);

/// Hurwitz zeta(s, a) for s > 1, a > 0.
double hurwitz_zeta(double s, double a);

/// ln(sinh x) for x > 0 without overflow.
double log_sinh(double x);

} // namespace nullctl
