#include "doctest.h"

#include "nullctl/error.hpp"
#include "nullctl/profile.hpp"
#include "nullctl/synthesis.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace nullctl;
using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double pi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidArgument;
}

class RayRule : public SequenceRule {
public:
    std::string name() const override { return "ray"; }
    std::vector<SpectralEntry> first(std::size_t count) const override
    {
        std::vector<SpectralEntry> out;
        for (std::size_t k = 1; k <= count; ++k)
            out.push_back(SpectralEntry::plain(double(k) * cplx(1, 1)));
        return out;
    }
};

ParabolicModel scalar_model(std::shared_ptr<const SequenceRule> rule, cplx b = 1.0)
{
    auto m = ParabolicModel::custom("scalar", std::move(rule), [b](const SpectralEntry& e, long k) {
        SpectralMode mode;
        mode.k = k;
        mode.lambda = e;
        mode.obs = {ObservationVector::scalar(b)};
        return mode;
    });
    m.pair_kernel = scalar_pair_kernel();
    return m;
}

ParabolicModel synthetic_jordan(double tau, double gamma_scale)
{
    auto m = ParabolicModel::custom("synthetic_jordan", power_rule(pi * pi, 2),
                                    [tau, gamma_scale](const SpectralEntry& e, long k) {
                                        SpectralMode mode;
                                        mode.k = k;
                                        mode.lambda = e;
                                        mode.kind = ModeKind::Jordan2;
                                        const double l = e.value().real();
                                        mode.mu = std::exp(-tau * l);
                                        mode.gamma = std::exp(gamma_scale * l);
                                        mode.obs = {ObservationVector::scalar(1.0),
                                                    ObservationVector::scalar(*mode.gamma)};
                                        return mode;
                                    });
    m.pair_kernel = scalar_pair_kernel();
    return m;
}

// Four pieces on both sides of omega = (0.4, 0.6) with int q phi_k^2 = 0 for
// k = 1, 2, 3. With q = 0 on all of (a, 1) psi_k would be a multiple of phi_k
// there, so omega has to sit between the pieces.
PiecewiseConstant balanced_coupling()
{
    const double lo[4] = {0, 0.1, 0.2, 0.75}, hi[4] = {0.1, 0.2, 0.3, 0.9};
    double A[3][4];
    for (int k = 0; k < 3; ++k)
        for (int p = 0; p < 4; ++p)
            A[k][p] = sine_product_integral(k + 1, k + 1, lo[p], hi[p]);
    auto det3 = [&](int skip) {
        double M[3][3];
        for (int k = 0; k < 3; ++k)
            for (int p = 0, c = 0; p < 4; ++p)
                if (p != skip)
                    M[k][c++] = A[k][p];
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    std::vector<double> v(6, 0);
    for (int p = 0; p < 4; ++p)
        v[std::size_t(p < 3 ? p : 4)] = (p % 2 ? -1 : 1) * det3(p);
    double s = 0;
    for (double x : v)
        s = std::max(s, std::abs(x));
    for (double& x : v)
        x /= s;
    return PiecewiseConstant::make({0, 0.1, 0.2, 0.3, 0.75, 0.9, 1}, v);
}

double ls_growth(const ControlPlan& plan)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < plan.N(); ++i) {
        x.push_back(plan.modes[i].lambda.value().real());
        y.push_back(std::log(plan.per_mode_norm[i]));
    }
    const std::size_t w = std::min<std::size_t>(x.size(), default_window);
    return ls_slope(std::vector<double>(x.end() - long(w), x.end()), std::vector<double>(y.end() - long(w), y.end()));
}

double max_abs(const std::vector<cplx>& v)
{
    double m = 0;
    for (auto c : v)
        m = std::max(m, std::abs(c));
    return m;
}

} // namespace

TEST_CASE("moment right-hand sides")
{
    auto heat = scalar_model(power_rule(pi * pi, 2)).with_initial([](long, int) { return cplx(1); });
    CHECK(moment_rhs(heat, 1, 1, 0).real() == doctest::Approx(-std::exp(-pi * pi)).epsilon(1e-14));
    CHECK(std::abs(moment_rhs(heat, 1, 1, 0) + 5.172e-5) < 1e-8);
    auto zero = scalar_model(power_rule(pi * pi, 2));
    CHECK(moment_rhs(zero, 1, 1, 0) == cplx(0));
    auto ray = scalar_model(std::make_shared<RayRule>()).with_initial([](long, int) { return cplx(1); });
    CHECK(std::abs(moment_rhs(ray, 1, 1, 0) + std::exp(-cplx(1, 1))) < 1e-15);
    CHECK(code_of([&] { moment_rhs(heat, 0, 1, 0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { moment_rhs(heat, 1, 1, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pointwise heat plan meets its moments")
{
    auto model = pointwise_heat(std::sqrt(2.0) - 1).with_initial([](long k, int) { return cplx(1.0 / double(k)); });
    auto plan = synthesize_simple(model, 0.4, 10);
    CHECK(plan.terms.size() == 10);
    auto rep = verify_moments(plan, model, 0.4, 10);
    CHECK(rep.max_abs <= 1e-8);
    CHECK(rep.tail_bound <= 1e-15);
    CHECK(rep.tail_bound > 0);
    CHECK(std::isfinite(plan.total_norm));
    CHECK(plan.total_norm <= plan.triangle_bound * (1 + 1e-12));
    // terminal coefficients agree with the residuals and sit at the solve level
    auto tp = terminal_projection(plan, model, 0.4, 10);
    REQUIRE(tp.size() == rep.residuals.size());
    for (std::size_t i = 0; i < tp.size(); ++i)
        CHECK(tp[i] == rep.residuals[i].value);
    double scale = 0;
    for (const auto& t : plan.terms)
        scale += std::abs(t.coeff) * t.direction.norm() * plan.modes[0].obs[0].norm();
    CHECK(max_abs(tp) <= 10 * std::max(plan.solver_residual, 1e-16) * std::max(scale, 1.0) + 1e-16);

    // per-mode norms: |coeff| ||q_k|| ||B*phi_k|| / ||B*phi_k||^2
    for (std::size_t k = 0; k < plan.N(); ++k) {
        const auto& t = plan.terms[k];
        const double b = plan.modes[k].obs[0].norm();
        CHECK(plan.per_mode_norm[k] ==
              doctest::Approx(std::abs(t.coeff) * plan.family->norms[t.basis] / b).epsilon(1e-10));
    }
}

TEST_CASE("moments agree with quadrature of the sampled control")
{
    const double T = 0.4;
    auto model = pointwise_heat(0.3).with_initial([](long k, int) { return cplx(k % 2 ? 1.0 : -0.5); });
    auto plan = synthesize_simple(model, T, 4);
    // composite 30-point Gauss-Legendre on 16 panels; u sampled once per node
    const auto& rule = gauss<double, 30>::abscissa();
    const auto& wts = gauss<double, 30>::weights();
    std::vector<double> nodes, weights;
    const int panels = 16;
    for (int p = 0; p < panels; ++p) {
        const double lo = T * p / panels, half = T / panels / 2, mid = lo + half;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            for (double sgn : {-1.0, 1.0}) {
                if (rule[i] == 0 && sgn > 0)
                    continue;
                nodes.push_back(mid + sgn * half * rule[i]);
                weights.push_back(half * wts[i]);
            }
        }
    }
    std::vector<double> u(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        u[i] = plan.sample(nodes[i])[0].real();
    for (const auto& m : model.modes(4)) {
        const double l = m.lambda.value().real();
        const double b = m.obs[0].value().real();
        double I = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            I += weights[i] * std::exp(-l * (T - nodes[i])) * u[i] * b;
        CHECK(std::abs(I + std::exp(-l * T) * m.y0[0].real()) < 1e-9);
    }
}

TEST_CASE("single mode plan in closed form")
{
    const double T = 0.5;
    auto model = pointwise_heat(0.3).with_initial([](long k, int) { return cplx(k == 1 ? 1.0 : 0.0); });
    auto plan = synthesize_simple(model, T, 1);
    REQUIRE(plan.terms.size() == 1);
    const double l = pi * pi;
    const double b = std::sqrt(2.0) * std::sin(0.3 * pi);
    CHECK(plan.terms[0].coeff.real() == doctest::Approx(-std::exp(-l * T)).epsilon(1e-14));
    CHECK(plan.terms[0].direction.value().real() == doctest::Approx(1 / b).epsilon(1e-14));
    // q_1 = e^{-l s} / int e^{-2 l s}
    const double n2 = -std::expm1(-2 * l * T) / (2 * l);
    CHECK(plan.total_norm == doctest::Approx(std::exp(-l * T) / (b * std::sqrt(n2))).epsilon(1e-12));
    CHECK(plan.sample(T - 0.1)[0].real() ==
          doctest::Approx(-std::exp(-l * T) / b * std::exp(-l * 0.1) / n2).epsilon(1e-12));
}

TEST_CASE("unobservable and unsupported models")
{
    auto half = pointwise_heat(0.5).with_initial([](long, int) { return cplx(1); });
    try {
        synthesize_simple(half, 0.4, 4);
        FAIL("expected UnobservableMode");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnobservableMode);
        CHECK(std::string(e.what()).find("mode 2") != std::string::npos);
    }
    CHECK(code_of([] { synthesize(harmonic_oscillator(), 1, 4); }) == ErrorCode::SynthesisUnsupported);
    CHECK(code_of([] { synthesize_simple(pointwise_heat(0.3), 0, 4); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { synthesize_simple(pointwise_heat(0.3), 1, 0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { synthesize_simple(synthetic_jordan(0.3, 0), 1, 2); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("multiple eigenvalues through spatial duals")
{
    auto q = balanced_coupling();
    for (long k = 1; k <= 3; ++k)
        CHECK(std::abs(q.weighted_product(k, k)) < 1e-14);
    auto model = cascade_internal_q(q, 0.4, 0.6).with_initial([](long k, int i) { return cplx(1.0 / double(k + i)); });
    auto modes = model.modes(3);
    for (const auto& m : modes)
        CHECK(m.kind == ModeKind::Multiple);
    auto plan = synthesize_multiple(model, 0.5, 3);
    CHECK(plan.terms.size() == 6);
    auto rep = verify_moments(plan, model, 0.5, 3);
    CHECK(rep.residuals.size() == 6);
    CHECK(rep.max_abs <= 1e-7);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(plan.spatial_sigma[k] > 0);
        CHECK(plan.spatial_max_norm[k] <= plan.spatial_bound[k] * (1 + 1e-10));
    }
    CHECK(plan.total_norm <= plan.triangle_bound * (1 + 1e-12));
    // mode 4 is a Jordan chain without gamma
    CHECK(code_of([&] { synthesize(model, 0.5, 4); }) == ErrorCode::StructuralHypothesisMissing);
}

TEST_CASE("one-branch multiple modes reduce to the simple plan")
{
    auto heat = pointwise_heat(0.3).with_initial([](long k, int) { return cplx(1.0 / double(k)); });
    auto as_multiple =
        ParabolicModel::custom("heat_r1", power_rule(pi * pi, 2), [heat](const SpectralEntry&, long k) {
            auto m = heat.mode(k);
            m.kind = ModeKind::Multiple;
            return m;
        }).with_initial(heat.initial());
    auto a = synthesize_simple(heat, 0.4, 6);
    auto b = synthesize_multiple(as_multiple, 0.4, 6);
    REQUIRE(a.terms.size() == b.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        CHECK(std::abs(a.terms[i].coeff - b.terms[i].coeff) <= 1e-12 * std::abs(a.terms[i].coeff));
        CHECK(std::abs(a.terms[i].direction.value() - b.terms[i].direction.value()) <=
              1e-12 * std::abs(a.terms[i].direction.value()));
    }
    CHECK(a.total_norm == doctest::Approx(b.total_norm).epsilon(1e-12));
}

TEST_CASE("dependent observations")
{
    auto m = ParabolicModel::custom("dependent", power_rule(pi * pi, 2), [](const SpectralEntry& e, long k) {
        SpectralMode mode;
        mode.k = k;
        mode.lambda = e;
        mode.kind = ModeKind::Multiple;
        mode.obs = {ObservationVector::scalar(1.0), ObservationVector::scalar(2.0)};
        return mode;
    });
    CHECK(code_of([&] { synthesize_multiple(m, 0.5, 2); }) == ErrorCode::DegenerateFamily);

    auto zero_mu_short = ParabolicModel::custom("short", power_rule(pi * pi, 2), [](const SpectralEntry& e, long k) {
        SpectralMode mode;
        mode.k = k;
        mode.lambda = e;
        mode.kind = ModeKind::Jordan2;
        mode.obs = {ObservationVector::scalar(1.0)};
        return mode;
    });
    CHECK(code_of([&] { synthesize_jordan(zero_mu_short, 0.5, 2); }) == ErrorCode::ZeroMuUnsupported);
}

TEST_CASE("jordan chains for the boundary cascade")
{
    auto q = PiecewiseConstant::indicator(0.2, 0.8);
    auto model = cascade_boundary_q(q).with_initial([](long k, int i) { return cplx(i ? 0.5 : 1.0) / double(k); });
    auto plan = synthesize_jordan(model, 0.5, 8);
    auto rep = verify_moments(plan, model, 0.5, 8);
    CHECK(rep.residuals.size() == 16);
    CHECK(rep.max_abs <= 1e-6);
    CHECK(plan.modes[2].obs[0].value().real() == doctest::Approx(3 * std::sqrt(2.0) * pi).epsilon(1e-12));
    CHECK(plan.total_norm <= plan.triangle_bound * (1 + 1e-12));
}

TEST_CASE("single jordan mode coefficients")
{
    const double T = 0.4;
    auto model = synthetic_jordan(0.1, 0.05).with_initial([](long, int i) { return cplx(i == 0 ? 1.0 : 0.0); });
    auto plan = synthesize_jordan(model, T, 1);
    REQUIRE(plan.terms.size() == 2);
    const auto& m = plan.modes[0];
    const double e = std::exp(-pi * pi * T);
    CHECK(plan.terms[0].coeff.real() == doctest::Approx(-e).epsilon(1e-14));
    // beta = -e gamma/mu + (e/mu)(y0_2 - T mu y0_1) with y0 = (1, 0)
    const cplx beta = -e * *m.gamma / m.mu - e * T;
    CHECK(std::abs(plan.terms[1].coeff - beta) <= 1e-13 * std::abs(beta));
    CHECK(verify_moments(plan, model, T, 1).max_abs <= 1e-10);

    auto no_gamma = ParabolicModel::custom("no_gamma", power_rule(pi * pi, 2), [](const SpectralEntry& en, long k) {
        SpectralMode mode;
        mode.k = k;
        mode.lambda = en;
        mode.kind = ModeKind::Jordan2;
        mode.mu = 0.5;
        mode.obs = {ObservationVector::scalar(1.0), ObservationVector::scalar(1.0)};
        return mode;
    });
    CHECK(code_of([&] { synthesize_jordan(no_gamma, T, 2); }) == ErrorCode::StructuralHypothesisMissing);
    auto blind = ParabolicModel::custom("blind", power_rule(pi * pi, 2), [](const SpectralEntry& en, long k) {
        SpectralMode mode;
        mode.k = k;
        mode.lambda = en;
        mode.kind = ModeKind::Jordan2;
        mode.mu = 0.5;
        mode.gamma = 1.0;
        mode.obs = {ObservationVector::scalar(0.0), ObservationVector::scalar(1.0)};
        return mode;
    });
    CHECK(code_of([&] { synthesize_jordan(blind, T, 2); }) == ErrorCode::UnobservableJordanBranch);
}

TEST_CASE("zero mu chains act as double eigenvalues")
{
    auto model = ParabolicModel::custom("zero_mu", power_rule(pi * pi, 2), [](const SpectralEntry& e, long k) {
                     SpectralMode mode;
                     mode.k = k;
                     mode.lambda = e;
                     mode.kind = ModeKind::Jordan2;
                     mode.obs = {ObservationVector::sine_series({1.0}, 0.2, 0.6),
                                 ObservationVector::sine_series({0.0, 1.0}, 0.2, 0.6)};
                     return mode;
                 }).with_initial([](long, int i) { return cplx(1.0 + i); });
    auto plan = synthesize_jordan(model, 0.5, 3);
    CHECK(plan.terms.size() == 6);
    CHECK(verify_moments(plan, model, 0.5, 3).max_abs <= 1e-8);
}

TEST_CASE("jordan growth sign follows the 2T threshold")
{
    auto model = synthetic_jordan(0.3, 0.3).with_initial([](long, int i) { return cplx(i == 0 ? 1.0 : 0.0); });
    auto below = synthesize_jordan(model, 0.4, 12);
    auto above = synthesize_jordan(model, 0.7, 12);
    CHECK(ls_growth(below) > 0);
    CHECK(ls_growth(above) < 0);
}

TEST_CASE("academic dichotomy")
{
    auto model = academic_lf(0.2).with_initial([](long, int) { return cplx(1); });
    auto fast = synthesize_simple(model, 0.1, 12);
    auto slow = synthesize_simple(model, 0.4, 12);
    CHECK(ls_growth(fast) > 0);
    CHECK(ls_growth(slow) < 0);
}

TEST_CASE("zero data and leakage")
{
    auto zero = pointwise_heat(0.3);
    auto plan = synthesize_simple(zero, 0.4, 5);
    CHECK(plan.total_norm == 0);
    auto rep = verify_moments(plan, zero, 0.4, 8);
    CHECK(rep.max_abs == 0);
    CHECK(rep.max_abs_beyond == 0);
    CHECK(rep.tail_bound == 0);

    auto model = pointwise_heat(0.3).with_initial([](long, int) { return cplx(1); });
    auto p = synthesize_simple(model, 0.1, 4);
    auto leak = verify_moments(p, model, 0.1, 6);
    CHECK(leak.residuals.size() == 6);
    CHECK(leak.max_abs <= 1e-9);
    CHECK(leak.max_abs_beyond > 0);
    CHECK(std::isfinite(leak.max_abs_beyond));
    // k = 5: uncontrolled decay plus a pairing bounded by Cauchy-Schwarz
    const auto m5 = model.mode(5);
    const double l5 = m5.lambda.value().real();
    double bound = std::exp(-l5 * 0.1);
    for (const auto& t : p.terms)
        bound += std::abs(t.coeff) * p.family->norms[t.basis] * std::sqrt(-std::expm1(-2 * l5 * 0.1) / (2 * l5)) *
                 std::abs(t.direction.inner_product(m5.obs[0]));
    CHECK(std::abs(leak.residuals[4].value) <= bound);
}

TEST_CASE("norm identities")
{
    auto model = pointwise_heat(std::sqrt(2.0) - 1).with_initial([](long k, int) { return cplx(std::cos(double(k))); });
    auto plan = synthesize_simple(model, 0.4, 8);
    std::vector<xcomplex> w(plan.family->coeffs.rows());
    for (const auto& t : plan.terms)
        w[t.basis] += to_x(t.coeff * t.direction.value());
    const double n2 = static_cast<double>(combination_norm2(*plan.family, w));
    CHECK(plan.total_norm * plan.total_norm == doctest::Approx(n2).epsilon(1e-10));
    CHECK(plan.total_norm <= plan.triangle_bound * (1 + 1e-12));
}

TEST_CASE("linearity in the initial data")
{
    auto y = [](long k, int) { return cplx(1.0 / double(k), 0.25); };
    auto z = [](long k, int) { return cplx(std::sin(double(k)), -1.0 / double(k * k)); };
    auto base = pointwise_heat(0.37);
    auto py = synthesize_simple(base.with_initial(y), 0.3, 8);
    auto pz = synthesize_simple(base.with_initial(z), 0.3, 8);
    auto ps = synthesize_simple(base.with_initial([&](long k, int i) { return y(k, i) + z(k, i); }), 0.3, 8);
    for (std::size_t i = 0; i < ps.terms.size(); ++i) {
        const cplx sum = py.terms[i].coeff + pz.terms[i].coeff;
        CHECK(std::abs(ps.terms[i].coeff - sum) <= 1e-12 * std::max(std::abs(sum), 1e-300));
    }
}

TEST_CASE("time rescaling")
{
    auto y = [](long k, int) { return cplx(1.0 / double(k)); };
    const double T = 0.3;
    auto a = synthesize_simple(scalar_model(power_rule(pi * pi, 2)).with_initial(y), T, 6);
    for (double s : {0.5, 2.0, 3.0}) {
        auto b = synthesize_simple(scalar_model(power_rule(pi * pi / s, 2)).with_initial(y), s * T, 6);
        CHECK(b.total_norm == doctest::Approx(a.total_norm / std::sqrt(s)).epsilon(1e-10));
    }
}

TEST_CASE("complex spectra")
{
    auto ray = scalar_model(std::make_shared<RayRule>(), cplx(0.5, 0.5)).with_initial([](long k, int) {
        return cplx(1.0, -1.0 / double(k));
    });
    auto plan = synthesize_simple(ray, 1.0, 5);
    CHECK(verify_moments(plan, ray, 1.0, 5).max_abs <= 1e-10);
}

TEST_CASE("finite 2x2 block through the Gramian")
{
    CHECK(eta(-2) == doctest::Approx(0.432332).epsilon(1e-6));
    CHECK(eta(-3) == doctest::Approx(0.316738).epsilon(1e-6));
    CHECK(eta(-4) == doctest::Approx(0.245421).epsilon(1e-6));
    CHECK(eta(0) == 1);

    auto block = Block2x2::make(1, 2, 1, 1);
    auto g = gramian_control_2x2(block, {1, 1}, 1);
    CHECK(g.Q[0][0] == doctest::Approx(eta(-2)).epsilon(1e-15));
    CHECK(g.Q[0][1] == doctest::Approx(eta(-3)).epsilon(1e-15));
    CHECK(g.Q[1][1] == doctest::Approx(eta(-4)).epsilon(1e-15));
    CHECK(g.sigma_bounds_ok);
    CHECK(g.det / g.trace <= g.sigma);
    CHECK(g.sigma <= 2 * g.det / g.trace);
    // smallest eigenvalue of Q
    const double disc = std::sqrt((g.Q[0][0] - g.Q[1][1]) * (g.Q[0][0] - g.Q[1][1]) + 4 * g.Q[0][1] * g.Q[0][1]);
    CHECK(g.sigma == doctest::Approx((g.trace - disc) / 2).epsilon(1e-9));

    auto yT = rk4_terminal(block, g, {1, 1}, 1);
    CHECK(std::hypot(yT[0], yT[1]) <= 1e-6 * std::sqrt(2.0));

    auto f = [&](double t) {
        const double u = g.control(block, 1, t);
        return u * u;
    };
    CHECK(gauss_kronrod<double, 61>::integrate(f, 0, 1, 10, 1e-14) == doctest::Approx(g.norm2).epsilon(1e-10));
    CHECK(g.t.size() == 2000);
    CHECK(g.bound_fit > 0);

    CHECK(code_of([] { Block2x2::make(1, 2, 0, 1); }) == ErrorCode::DegenerateB);
}

TEST_CASE("uniform sampling matches pointwise evaluation")
{
    auto model = pointwise_heat(0.3).with_initial([](long k, int) { return cplx(1.0 / double(k)); });
    auto plan = synthesize_simple(model, 0.4, 6);
    auto grid = plan.sample_uniform(41);
    REQUIRE(grid.size() == 41);
    for (std::size_t i = 0; i < 41; i += 5) {
        const cplx direct = plan.sample(0.4 * double(i) / 40)[0];
        CHECK(std::abs(grid[i][0] - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }

    auto q = PiecewiseConstant::indicator(0.2, 0.8);
    auto casc = cascade_boundary_q(q).with_initial([](long k, int) { return cplx(1.0 / double(k)); });
    auto jp = synthesize_jordan(casc, 0.5, 4);
    auto g2 = jp.sample_uniform(11);
    for (std::size_t i = 0; i < 11; ++i) {
        const cplx direct = jp.sample(0.05 * double(i))[0];
        CHECK(std::abs(g2[i][0] - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
}
