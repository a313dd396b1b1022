#include "nullctl/error.hpp"
#include "nullctl/models.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace nullctl {

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);

double phi(long k, double x) { return sqrt2 * std::sin(double(k) * pi * x); }

cplx snap(cplx v) { return std::abs(v) < vanishing_observation ? cplx(0) : v; }

SpectralMode simple_mode(const SpectralEntry& e, long k, cplx obs)
{
    SpectralMode m;
    m.k = k;
    m.lambda = e;
    m.kind = ModeKind::Simple;
    m.obs = {ObservationVector::scalar(snap(obs))};
    return m;
}

// eigenvalue shared by both families when sqrt(d) is rational
SpectralMode shared_mode(const SpectralEntry& e, long k, cplx obs1, cplx obs2)
{
    SpectralMode m;
    m.k = k;
    m.lambda = e;
    m.kind = ModeKind::Multiple;
    m.obs = {ObservationVector::scalar(snap(obs1)), ObservationVector::scalar(snap(obs2))};
    return m;
}

long partner_index(long i, double d) { return std::lround(double(i) / std::sqrt(d)); }

double total_variation_bound(const PiecewiseConstant& q)
{
    double V = 0;
    for (double v : q.values)
        V += std::abs(v);
    return V;
}

void check_x0(double x0)
{
    if (!(x0 > 0 && x0 < 1))
        throw Error(ErrorCode::InvalidArgument, "x0 must lie in (0, 1)");
}

void check_d(double d)
{
    if (!(d > 0) || !(std::abs(d - 1) > 1e-9))
        throw Error(ErrorCode::InvalidArgument, "d must be positive and different from 1");
}

} // namespace

struct ParabolicModel::Cache {
    std::mutex mu;
    std::vector<SpectralMode> modes;
};

ParabolicModel ParabolicModel::custom(std::string name, std::shared_ptr<const SequenceRule> rule, ModeMaker make)
{
    ParabolicModel m;
    m.name_ = std::move(name);
    m.seq_ = SpectralSequence::generated(std::move(rule));
    m.make_ = std::move(make);
    m.cache_ = std::make_shared<Cache>();
    return m;
}

std::vector<SpectralMode> ParabolicModel::modes(std::size_t K) const
{
    std::vector<SpectralMode> out;
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto& have = cache_->modes;
        if (have.size() < K) {
            auto entries = seq_.entries(K);
            for (std::size_t j = have.size(); j < K && j < entries->size(); ++j)
                have.push_back(make_((*entries)[j], long(j + 1)));
        }
        out.assign(have.begin(), have.begin() + std::ptrdiff_t(std::min(K, have.size())));
    }
    for (auto& m : out) {
        m.y0.assign(m.branches(), cplx(0));
        if (initial_)
            for (std::size_t i = 0; i < m.branches(); ++i)
                m.y0[i] = initial_(m.k, int(i));
    }
    return out;
}

SpectralMode ParabolicModel::mode(long k) const
{
    if (k < 1)
        throw Error(ErrorCode::InvalidArgument, "mode index is 1-based");
    auto all = modes(std::size_t(k));
    if (all.size() < std::size_t(k))
        throw Error(ErrorCode::TooFewModes, "model has fewer than " + std::to_string(k) + " modes");
    return all.back();
}

ParabolicModel ParabolicModel::with_initial(InitialData y0) const
{
    ParabolicModel m = *this;
    m.initial_ = std::move(y0);
    return m;
}

PairKernelRule scalar_pair_kernel()
{
    return [](const SpectralMode& a, const SpectralMode& b) -> std::optional<std::array<cplx, 2>> {
        if (a.obs.empty() || b.obs.empty() || a.obs[0].kind() != ObservationVector::Kind::Scalar ||
            b.obs[0].kind() != ObservationVector::Kind::Scalar)
            return std::nullopt;
        return std::array<cplx, 2>{b.obs[0].value(), -a.obs[0].value()};
    };
}

ParabolicModel pointwise_heat(double x0)
{
    check_x0(x0);
    auto m = ParabolicModel::custom("pointwise_heat", power_rule(pi * pi, 2),
                                    [x0](const SpectralEntry& e, long k) { return simple_mode(e, k, phi(k, x0)); });
    m.pair_kernel = scalar_pair_kernel();
    m.tmin = TminRule{"-ln|phi_k(x0)| / lambda_k", [x0](std::size_t K, int window) {
                          std::vector<long> ks;
                          std::vector<double> v;
                          for (std::size_t k = 1; k <= K; ++k) {
                              double o = std::abs(snap(phi(long(k), x0)));
                              ks.push_back(long(k));
                              v.push_back(o == 0 ? std::numeric_limits<double>::infinity()
                                                 : -std::log(o) / (double(k * k) * pi * pi));
                          }
                          return make_profile(ks, v, window);
                      }};
    return m;
}

CascadeModeData cascade_mode_data(const PiecewiseConstant& q, double a, double b, long k, long M)
{
    if (k < 1)
        throw Error(ErrorCode::InvalidArgument, "mode index is 1-based");
    M = std::max(M, 2 * k);
    CascadeModeData d;
    d.k = k;
    d.I = q.weighted_product(k, k);
    d.I1 = q.weighted_product(k, k, 0, a);
    d.g_hat_k = d.I - q.weighted_product(k, k);
    const double lk = double(k * k) * pi * pi;
    d.psi.assign(std::size_t(M), 0.0);
    for (long m = 1; m <= M; ++m) {
        if (m == k)
            continue;
        double g = -q.weighted_product(k, m);
        d.psi[std::size_t(m - 1)] = g / (double(m * m) * pi * pi - lk);
    }
    const double V = total_variation_bound(q);
    d.psi_tail2 = 16 * V * V / (5 * std::pow(pi, 6) * std::pow(double(M - k), 5));

    std::vector<cplx> ek(std::size_t(k), 0.0), psi(d.psi.begin(), d.psi.end());
    ek.back() = 1;
    auto phik = ObservationVector::sine_series(ek, a, b);
    auto psik = ObservationVector::sine_series(psi, a, b);
    d.tau = psik.inner_product(phik).real() / phik.inner_product(phik).real();
    d.xi_norm = (psik + phik * (-d.tau)).norm();
    return d;
}

ParabolicModel cascade_internal_q(const PiecewiseConstant& q, double a, double b, long M)
{
    if (!(0 <= a && a < b && b <= 1))
        throw Error(ErrorCode::InvalidArgument, "omega must satisfy 0 <= a < b <= 1");
    if (q.support_overlap(a, b) > 0)
        throw Error(ErrorCode::SupportOverlap, "support of q meets the control region");
    const double zero_tol = 1e-13 * std::max(1.0, total_variation_bound(q));
    auto m = ParabolicModel::custom(
        "cascade_internal_q", power_rule(pi * pi, 2), [q, a, b, M, zero_tol](const SpectralEntry& e, long k) {
            auto d = cascade_mode_data(q, a, b, k, M);
            std::vector<cplx> ek(std::size_t(k), 0.0), psi(d.psi.begin(), d.psi.end());
            ek.back() = 1;
            SpectralMode mode;
            mode.k = k;
            mode.lambda = e;
            mode.obs = {ObservationVector::sine_series(ek, a, b), ObservationVector::sine_series(psi, a, b)};
            if (std::abs(d.I) <= zero_tol) {
                mode.kind = ModeKind::Multiple;
                mode.lambda.geom_mult = 2;
            } else {
                mode.kind = ModeKind::Jordan2;
                mode.mu = d.I;
                mode.lambda.jordan_mu = d.I;
            }
            return mode;
        });
    m.tmin = TminRule{"min(-ln|I_k(q)|, -ln|I_1k(q)|) / lambda_k", [q, a](std::size_t K, int window) {
                          std::vector<long> ks;
                          std::vector<double> v;
                          for (std::size_t k = 1; k <= K; ++k) {
                              double I = std::abs(q.weighted_product(long(k), long(k)));
                              double I1 = std::abs(q.weighted_product(long(k), long(k), 0, a));
                              double best = std::min(-std::log(I), -std::log(I1));
                              ks.push_back(long(k));
                              v.push_back(best / (double(k * k) * pi * pi));
                          }
                          return make_profile(ks, v, window);
                      }};
    if (q.identically_zero()) {
        m.approx_controllable = false;
        m.notes.push_back("|I_k(q)| + |I_1k(q)| vanishes for every k: not approximately controllable");
    } else {
        for (long k = 1; k <= 100; ++k)
            if (std::abs(q.weighted_product(k, k)) <= zero_tol && std::abs(q.weighted_product(k, k, 0, a)) <= zero_tol) {
                m.approx_controllable = false;
                m.notes.push_back("|I_k(q)| + |I_1k(q)| vanishes at k = " + std::to_string(k));
                break;
            }
    }
    m.notes.push_back("phi_{k,2} = (phi_k, psi_k) is not normalized; mu_k = I_k(q)");
    return m;
}

BoundaryDerivative cascade_psi_prime0(const PiecewiseConstant& q, long k, long M)
{
    M = std::max(M, 2 * k);
    const double lk = double(k * k) * pi * pi;
    BoundaryDerivative r;
    double s = 0, c = 0;
    for (long m = 1; m <= M; ++m) {
        if (m == k)
            continue;
        double psi = -q.weighted_product(k, m) / (double(m * m) * pi * pi - lk);
        double t = psi * sqrt2 * double(m) * pi;
        // compensated: terms alternate in sign and the sum is much smaller than its largest term
        double y = t - c;
        double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    r.value = s;
    r.tail = 4 * sqrt2 * total_variation_bound(q) / (pi * pi * double(M - k));
    return r;
}

ParabolicModel cascade_boundary_q(const PiecewiseConstant& q, long M)
{
    auto m = ParabolicModel::custom(
        "cascade_boundary_q", power_rule(pi * pi, 2), [q, M](const SpectralEntry& e, long k) {
            SpectralMode mode;
            mode.k = k;
            mode.lambda = e;
            mode.kind = ModeKind::Jordan2;
            mode.mu = q.weighted_product(k, k);
            mode.lambda.jordan_mu = mode.mu;
            const double o1 = sqrt2 * double(k) * pi;
            const double o2 = cascade_psi_prime0(q, k, M).value;
            mode.obs = {ObservationVector::scalar(o1), ObservationVector::scalar(o2)};
            mode.gamma = o2 / o1;
            return mode;
        });
    m.pair_kernel = scalar_pair_kernel();
    m.tmin = TminRule{"-ln|I_k(q)| / lambda_k", [q](std::size_t K, int window) {
                          std::vector<long> ks;
                          std::vector<double> v;
                          for (std::size_t k = 1; k <= K; ++k) {
                              ks.push_back(long(k));
                              v.push_back(-std::log(std::abs(q.weighted_product(long(k), long(k)))) /
                                          (double(k * k) * pi * pi));
                          }
                          return make_profile(ks, v, window);
                      }};
    m.notes.push_back("B*phi_{k,2} = psi_k'(0) from the truncated expansion of psi_k; scaling inferred");
    return m;
}

std::optional<std::string> rational_root_warning(double d)
{
    const double r = std::sqrt(d);
    for (long den = 1; den <= 50; ++den) {
        double num = std::round(r * double(den));
        if (num > 0 && std::abs(r - num / double(den)) <= 1e-9) {
            std::ostringstream os;
            os << "RATIONAL_ROOT_WARNING: sqrt(d) is within 1e-9 of " << long(num) << "/" << den
               << "; eigenvalues k^2 pi^2 and d k^2 pi^2 collide";
            return os.str();
        }
    }
    return std::nullopt;
}

ParabolicModel two_diffusion_boundary(double d)
{
    check_d(d);
    auto m = ParabolicModel::custom("two_diffusion_boundary", two_diffusion_rule(d, pi * pi),
                                    [d](const SpectralEntry& e, long k) {
                                        auto obs = [d](int family, long n) {
                                            const double ln = double(n * n) * pi * pi;
                                            return cplx(family == 0 ? sqrt2 / (d - 1) : sqrt2 * ln);
                                        };
                                        if (e.geom_mult == 2)
                                            return shared_mode(e, k, obs(0, e.family_index),
                                                               obs(1, partner_index(e.family_index, d)));
                                        return simple_mode(e, k, obs(e.family, e.family_index));
                                    });
    m.pair_kernel = scalar_pair_kernel();
    auto seq = m.spectrum();
    m.tmin = TminRule{"condensation index c(Lambda)", [seq](std::size_t K, int window) {
                          return condensation_profile(seq, K, default_rel_tail_tol, window);
                      }};
    if (auto w = rational_root_warning(d))
        m.warnings.push_back(*w);
    return m;
}

ParabolicModel two_diffusion_pointwise(double d, double x0)
{
    check_d(d);
    check_x0(x0);
    auto m = ParabolicModel::custom("two_diffusion_pointwise", two_diffusion_rule(d, pi * pi),
                                    [d, x0](const SpectralEntry& e, long k) {
                                        auto obs = [d, x0](int family, long n) {
                                            const double ln = double(n * n) * pi * pi;
                                            const double p = phi(n, x0);
                                            return cplx(family == 0 ? p / (std::sqrt(ln) * (d - 1)) : std::sqrt(ln) * p);
                                        };
                                        if (e.geom_mult == 2)
                                            return shared_mode(e, k, obs(0, e.family_index),
                                                               obs(1, partner_index(e.family_index, d)));
                                        return simple_mode(e, k, obs(e.family, e.family_index));
                                    });
    m.pair_kernel = scalar_pair_kernel();
    auto seq = m.spectrum();
    m.tmin = TminRule{"max_i (-ln|phi_k(x0)| - ln|E'(lambda_{k,i})|) / lambda_{k,i}",
                      [seq, x0](std::size_t K, int window) {
                          auto e = seq.entries(K);
                          std::vector<long> ks;
                          std::vector<double> v;
                          for (std::size_t j = 0; j < K && j < e->size(); ++j) {
                              const auto& en = (*e)[j];
                              double p = std::abs(snap(phi(en.family_index, x0)));
                              ks.push_back(long(j + 1));
                              if (p == 0) {
                                  v.push_back(std::numeric_limits<double>::infinity());
                                  continue;
                              }
                              v.push_back((-std::log(p) - log_E_prime(seq, j + 1)) / en.value().real());
                          }
                          return make_profile(ks, v, window);
                      }};
    if (auto w = rational_root_warning(d))
        m.warnings.push_back(*w);
    return m;
}

ParabolicModel academic_lf(double tau)
{
    if (!(tau > 0))
        throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    auto m = ParabolicModel::custom("academic_lf", academic_lf_rule(tau), [](const SpectralEntry& e, long k) {
        // phi_k^{+-} = (phi_k, -+phi_k)/sqrt2 and B = (0, 1)^t
        return simple_mode(e, k, e.family == 1 ? -1 / sqrt2 : 1 / sqrt2);
    });
    m.pair_kernel = scalar_pair_kernel();
    auto seq = m.spectrum();
    m.tmin = TminRule{"-ln|f(lambda_k)| / lambda_k with f(s) = exp(-tau s)", [seq, tau](std::size_t K, int window) {
                          auto e = seq.entries(K);
                          std::vector<long> ks;
                          std::vector<double> v;
                          for (std::size_t j = 0; j < K && j < e->size(); ++j) {
                              ks.push_back(long(j + 1));
                              const double lk = (*e)[j].base.real();
                              const double log_f = -tau * lk;
                              v.push_back(-log_f / lk);
                          }
                          return make_profile(ks, v, window);
                      }};
    return m;
}

ParabolicModel harmonic_oscillator()
{
    auto m = ParabolicModel::custom("harmonic_oscillator", harmonic_rule(), [](const SpectralEntry& e, long k) {
        SpectralMode mode;
        mode.k = k;
        mode.lambda = e;
        mode.obs = {ObservationVector::unavailable()};
        return mode;
    });
    m.synthesis_supported = false;
    m.notes.push_back("the Hautus-type inequality holds for every T > 0 while null controllability holds for no T; "
                      "the eigenvalues are not summable, so T* = 0 says nothing here");
    return m;
}

Block2x2 Block2x2::make(double lambda1, double lambda2, double b1, double b2)
{
    if (!(0 < lambda1 && lambda1 < lambda2))
        throw Error(ErrorCode::InvalidArgument, "block needs 0 < lambda1 < lambda2");
    if (!(b1 * b2 != 0) || !std::isfinite(b1 * b2))
        throw Error(ErrorCode::DegenerateB, "block needs b1 b2 != 0");
    return {lambda1, lambda2, b1, b2};
}

} // namespace nullctl
