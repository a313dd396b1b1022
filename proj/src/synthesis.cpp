#include "nullctl/synthesis.hpp"

#include "nullctl/biortho_space.hpp"
#include "nullctl/error.hpp"

#include <algorithm>
#include <cmath>

namespace nullctl {

namespace {

enum class Treatment { Simple, Spatial, Chain };

enum class Allow { Simple, Multiple, Jordan, Any };

std::string mode_label(const SpectralMode& m)
{
    return "mode " + std::to_string(m.k) + " (lambda = " + std::to_string(m.lambda.value().real()) + ")";
}

cplx decay(const SpectralMode& m, double T) { return std::exp(-m.lambda.value() * T); }

// e^{-lambda T} without underflow; coefficients built from it only leave
// extended range once they are genuinely negligible
xcomplex decay_x(const SpectralMode& m, double T) { return exp(-extended_rate(m.lambda) * xcomplex{xreal(T), xreal(0)}); }

// Spatial duals Psi_i of the observations of one eigenvalue: <Psi_i, B*phi_{k,j}> = delta_ij.
struct SpatialResult {
    std::vector<ObservationVector> psi;
    double sigma = 0, bound = 0, max_norm = 0;
};

SpatialResult spatial_duals(const SpectralMode& m)
{
    const std::size_t r = m.obs.size();
    Matrix<cplx> G(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            G(i, j) = m.obs[i].inner_product(m.obs[j]);
    // coordinates in an orthonormal basis of span{obs}: G = L L^H
    Matrix<cplx> L(r, r);
    for (std::size_t j = 0; j < r; ++j) {
        cplx d = G(j, j);
        for (std::size_t p = 0; p < j; ++p)
            d -= L(j, p) * std::conj(L(j, p));
        if (!(d.real() > degeneracy_tol * G(j, j).real()))
            throw Error(ErrorCode::DegenerateFamily, "observations of " + mode_label(m) +
                                                         " are linearly dependent: approximate controllability fails");
        L(j, j) = std::sqrt(d.real());
        for (std::size_t i = j + 1; i < r; ++i) {
            cplx s = G(i, j);
            for (std::size_t p = 0; p < j; ++p)
                s -= L(i, p) * std::conj(L(j, p));
            L(i, j) = s / L(j, j);
        }
    }
    std::vector<std::vector<cplx>> coords(r, std::vector<cplx>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            coords[i][j] = L(i, j);
    SpatialDual dual;
    try {
        dual = biorthogonalize(VectorFamily::make(coords));
    } catch (const Error& e) {
        throw Error(e.code(), mode_label(m) + ": " + e.what());
    }
    SpatialResult out;
    out.sigma = dual.sigma;
    out.bound = dual.bound;
    for (double n : dual.norms)
        out.max_norm = std::max(out.max_norm, n);
    for (std::size_t i = 0; i < r; ++i) {
        ObservationVector psi = m.obs[0] * dual.combination(i, 0);
        for (std::size_t j = 1; j < r; ++j)
            psi = psi + m.obs[j] * dual.combination(i, j);
        out.psi.push_back(psi);
    }
    return out;
}

Treatment classify(const SpectralMode& m, Allow allow)
{
    for (const auto& o : m.obs)
        if (o.kind() == ObservationVector::Kind::Unavailable)
            throw Error(ErrorCode::SynthesisUnsupported, mode_label(m) + ": observations are unavailable");
    switch (m.kind) {
    case ModeKind::Simple:
        if (allow == Allow::Jordan)
            throw Error(ErrorCode::InvalidArgument, mode_label(m) + " has no Jordan chain");
        if (m.obs.empty() || m.obs[0].is_zero() || m.obs[0].norm() == 0)
            throw Error(ErrorCode::UnobservableMode, mode_label(m) + " is unobservable: B*phi_k = 0");
        return allow == Allow::Multiple ? Treatment::Spatial : Treatment::Simple;
    case ModeKind::Multiple:
        if (allow == Allow::Simple || allow == Allow::Jordan)
            throw Error(ErrorCode::InvalidArgument, mode_label(m) + " is a multiple eigenvalue");
        return Treatment::Spatial;
    case ModeKind::Jordan2:
        if (allow == Allow::Simple || allow == Allow::Multiple)
            throw Error(ErrorCode::InvalidArgument, mode_label(m) + " carries a Jordan chain");
        if (std::abs(m.mu) == 0) {
            if (m.obs.size() < 2)
                throw Error(ErrorCode::ZeroMuUnsupported, mode_label(m) + ": mu = 0 needs both observations");
            return Treatment::Spatial;
        }
        if (m.obs.size() < 2 || m.obs[0].norm() == 0)
            throw Error(ErrorCode::UnobservableJordanBranch, mode_label(m) + ": B*phi_{k,1} = 0");
        if (!m.gamma)
            throw Error(ErrorCode::StructuralHypothesisMissing,
                        mode_label(m) + ": no gamma_k with B*phi_{k,2} = gamma_k B*phi_{k,1}");
        return Treatment::Chain;
    }
    return Treatment::Simple;
}

ControlPlan build(const ParabolicModel& model, double T, std::size_t N, Precision precision, Allow allow,
                  std::string name)
{
    if (!(T > 0))
        throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
    if (N == 0)
        throw Error(ErrorCode::InvalidArgument, "number of controlled modes must be positive");
    if (!model.synthesis_supported)
        throw Error(ErrorCode::SynthesisUnsupported, model.name() + " does not support control synthesis");
    ControlPlan plan;
    plan.T = T;
    plan.name = std::move(name);
    plan.modes = model.modes(N);
    if (plan.modes.size() < N)
        throw Error(ErrorCode::TooFewModes, model.name() + " provides fewer than " + std::to_string(N) + " modes");

    std::vector<Treatment> how;
    std::vector<xcomplex> rates;
    std::vector<int> chain;
    for (const auto& m : plan.modes) {
        how.push_back(classify(m, allow));
        rates.push_back(conj(extended_rate(m.lambda)));
        chain.push_back(how.back() == Treatment::Chain ? 2 : 1);
    }
    auto span = ExponentialSpan::mixed(rates, chain, T);
    auto family = std::make_shared<BiorthogonalFamily>(build_biortho(span, precision));
    plan.family = family;
    plan.solver_residual = family->residual;

    plan.spatial_sigma.assign(N, 0);
    plan.spatial_bound.assign(N, 0);
    plan.spatial_max_norm.assign(N, 0);
    for (std::size_t k = 0; k < N; ++k) {
        const auto& m = plan.modes[k];
        const std::size_t off = span.offset_of(k);
        const xcomplex e = decay_x(m, T);
        switch (how[k]) {
        case Treatment::Simple: {
            const double n2 = m.obs[0].inner_product(m.obs[0]).real();
            plan.terms.push_back({k, off, m.obs[0] * (1 / n2), to_std(-e * to_x(m.y0[0]))});
            break;
        }
        case Treatment::Spatial: {
            auto sp = spatial_duals(m);
            plan.spatial_sigma[k] = sp.sigma;
            plan.spatial_bound[k] = sp.bound;
            plan.spatial_max_norm[k] = sp.max_norm;
            for (std::size_t i = 0; i < sp.psi.size(); ++i)
                plan.terms.push_back({k, off, sp.psi[i], to_std(-e * to_x(m.y0[i]))});
            break;
        }
        case Treatment::Chain: {
            const double n2 = m.obs[0].inner_product(m.obs[0]).real();
            ObservationVector d = m.obs[0] * (1 / n2);
            const xcomplex g = to_x(d.inner_product(m.obs[1]));
            const xcomplex alpha = -e * to_x(m.y0[0]);
            const xcomplex beta =
                (alpha * g + e * to_x(m.y0[1] - T * m.mu * m.y0[0])) / to_x(m.mu);
            plan.terms.push_back({k, off, d, to_std(alpha)});
            plan.terms.push_back({k, off + 1, d, to_std(beta)});
            break;
        }
        }
    }

    // <q_a, q_b> = sum_{m,l} C_am conj(C_bl) G_lm
    const std::size_t n = family->coeffs.rows();
    Matrix<xcomplex> CG(n, n), DG(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t l = 0; l < n; ++l) {
            xcomplex s;
            for (std::size_t m = 0; m < n; ++m)
                s += family->coeffs(a, m) * family->gram(l, m);
            CG(a, l) = s;
        }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            xcomplex s;
            for (std::size_t l = 0; l < n; ++l)
                s += CG(a, l) * conj(family->coeffs(b, l));
            DG(a, b) = s;
        }
    auto quad = [&](const std::vector<std::size_t>& idx) {
        xcomplex s;
        for (std::size_t x : idx)
            for (std::size_t y : idx) {
                const auto& tx = plan.terms[x];
                const auto& ty = plan.terms[y];
                cplx w = tx.coeff * std::conj(ty.coeff) * tx.direction.inner_product(ty.direction);
                s += to_x(w) * DG(tx.basis, ty.basis);
            }
        return std::sqrt(std::max(0.0, static_cast<double>(s.re)));
    };
    std::vector<std::size_t> all(plan.terms.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    plan.total_norm = quad(all);
    plan.per_mode_norm.assign(N, 0);
    for (std::size_t k = 0; k < N; ++k) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < plan.terms.size(); ++i)
            if (plan.terms[i].mode == k)
                idx.push_back(i);
        plan.per_mode_norm[k] = quad(idx);
    }
    for (const auto& t : plan.terms)
        plan.triangle_bound += std::abs(t.coeff) * family->norms[t.basis] * t.direction.norm();
    return plan;
}

// int_0^T e^{-lambda s} s^a q_k(s) ds for every basis index k
std::vector<cplx> moments_of_family(const BiorthogonalFamily& fam, const SpectralEntry& lambda, int a)
{
    // the family lives on conj(lambda): int s^a e^{-conj(l) s} conj(q_k) = delta
    auto p = pair_with_exponential(fam, conj(extended_rate(lambda)), a);
    std::vector<cplx> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out[i] = std::conj(to_std(p[i]));
    return out;
}

std::vector<MomentResidual> residuals(const ControlPlan& plan, const std::vector<SpectralMode>& modes, double T)
{
    std::vector<MomentResidual> out;
    for (const auto& m : modes) {
        auto P0 = moments_of_family(*plan.family, m.lambda, 0);
        const bool chain = m.kind == ModeKind::Jordan2 && std::abs(m.mu) != 0;
        std::vector<cplx> P1;
        if (chain)
            P1 = moments_of_family(*plan.family, m.lambda, 1);
        const cplx e = decay(m, T);
        for (std::size_t i = 0; i < m.branches(); ++i) {
            cplx s = 0;
            if (chain && i == 1) {
                for (const auto& t : plan.terms)
                    s += t.coeff * (P0[t.basis] * t.direction.inner_product(m.obs[1]) -
                                    m.mu * P1[t.basis] * t.direction.inner_product(m.obs[0]));
                s += e * (m.y0[1] - T * m.mu * m.y0[0]);
            } else {
                for (const auto& t : plan.terms)
                    s += t.coeff * P0[t.basis] * t.direction.inner_product(m.obs[i]);
                s += e * m.y0[i];
            }
            out.push_back({m.k, int(i), s});
        }
    }
    return out;
}

} // namespace

cplx moment_rhs(const ParabolicModel& model, double T, long k, int branch)
{
    if (!(T > 0))
        throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
    auto m = model.mode(k);
    if (branch < 0 || std::size_t(branch) >= m.branches())
        throw Error(ErrorCode::InvalidArgument, "branch out of range for " + mode_label(m));
    return -decay(m, T) * m.y0[std::size_t(branch)];
}

ControlPlan synthesize_simple(const ParabolicModel& model, double T, std::size_t N, Precision precision)
{
    return build(model, T, N, precision, Allow::Simple, "simple");
}

ControlPlan synthesize_multiple(const ParabolicModel& model, double T, std::size_t N, Precision precision)
{
    return build(model, T, N, precision, Allow::Multiple, "multiple");
}

ControlPlan synthesize_jordan(const ParabolicModel& model, double T, std::size_t N, Precision precision)
{
    return build(model, T, N, precision, Allow::Jordan, "jordan");
}

ControlPlan synthesize(const ParabolicModel& model, double T, std::size_t N, Precision precision)
{
    return build(model, T, N, precision, Allow::Any, "mixed");
}

std::vector<cplx> ControlPlan::sample(double t) const
{
    std::vector<cplx> out;
    for (const auto& term : terms) {
        const cplx q = evaluate_dual(*family, term.basis, T - t);
        ObservationVector piece = term.direction * (term.coeff * q);
        if (piece.kind() == ObservationVector::Kind::Scalar) {
            out.resize(1);
            out[0] += piece.value();
        } else {
            const auto& c = piece.coeffs();
            if (out.size() < c.size())
                out.resize(c.size());
            for (std::size_t i = 0; i < c.size(); ++i)
                out[i] += c[i];
        }
    }
    return out;
}

std::vector<std::vector<cplx>> ControlPlan::sample_uniform(std::size_t n) const
{
    if (n < 2)
        throw Error(ErrorCode::InvalidArgument, "need at least two sample points");
    std::size_t width = 1;
    for (const auto& term : terms)
        if (term.direction.kind() == ObservationVector::Kind::SineSeries)
            width = std::max(width, term.direction.coeffs().size());
    // u(T - s) = sum_m D_m s^a_m e^{-r_m s}
    const auto basis = family->span.basis();
    std::vector<std::vector<xcomplex>> D(basis.size(), std::vector<xcomplex>(width));
    for (const auto& term : terms) {
        std::vector<cplx> dir(width);
        if (term.direction.kind() == ObservationVector::Kind::Scalar)
            dir[0] = term.direction.value();
        else
            std::copy(term.direction.coeffs().begin(), term.direction.coeffs().end(), dir.begin());
        for (std::size_t p = 0; p < width; ++p) {
            if (dir[p] == cplx(0))
                continue;
            const xcomplex w = to_x(term.coeff * dir[p]);
            for (std::size_t m = 0; m < basis.size(); ++m)
                D[m][p] += w * family->coeffs(term.basis, m);
        }
    }
    // s_j = T j / (n - 1); exponentials advance by one fixed factor per step
    const xreal ds = xreal(T) / xreal(double(n - 1));
    const auto& rates = family->span.rates;
    std::vector<xcomplex> step(rates.size()), cur(rates.size(), xcomplex{xreal(1), xreal(0)});
    for (std::size_t r = 0; r < rates.size(); ++r)
        step[r] = exp(-rates[r] * xcomplex{ds, xreal(0)});
    std::vector<std::vector<cplx>> out(n, std::vector<cplx>(width));
    for (std::size_t j = 0; j < n; ++j) {
        const xcomplex s{ds * xreal(double(j)), xreal(0)};
        for (std::size_t p = 0; p < width; ++p) {
            xcomplex acc;
            for (std::size_t m = 0; m < basis.size(); ++m) {
                xcomplex e = cur[basis[m].rate];
                if (basis[m].power == 1)
                    e *= s;
                acc += D[m][p] * e;
            }
            out[n - 1 - j][p] = to_std(acc);
        }
        for (std::size_t r = 0; r < rates.size(); ++r)
            cur[r] *= step[r];
    }
    return out;
}

MomentResidualReport verify_moments(const ControlPlan& plan, const ParabolicModel& model, double T,
                                    std::size_t N_check)
{
    if (T != plan.T)
        throw Error(ErrorCode::InvalidArgument, "plan was built for another horizon");
    MomentResidualReport rep;
    auto modes = model.modes(std::max(N_check, plan.N()));
    modes.resize(std::min(modes.size(), N_check));
    rep.residuals = residuals(plan, modes, T);
    for (const auto& r : rep.residuals) {
        if (std::size_t(r.k) <= plan.N())
            rep.max_abs = std::max(rep.max_abs, std::abs(r.value));
        else
            rep.max_abs_beyond = std::max(rep.max_abs_beyond, std::abs(r.value));
    }

    // uncontrolled tail, summed until it stops moving
    double tail = 0;
    std::size_t have = plan.N();
    const std::size_t cap = plan.N() + 4096;
    bool done = false;
    while (!done && have < cap) {
        auto next = model.modes(have + 16);
        if (next.size() <= have)
            break;
        for (std::size_t i = have; i < next.size(); ++i) {
            const double w = std::exp(-next[i].lambda.value().real() * T);
            double y = 0;
            for (const auto& c : next[i].y0)
                y += std::abs(c);
            tail += w * y;
            if (w < 1e-17 && w * y <= 1e-17 * tail)
                done = true;
            if (w == 0)
                done = true;
        }
        have = next.size();
    }
    rep.tail_bound = tail;
    return rep;
}

std::vector<cplx> terminal_projection(const ControlPlan& plan, const ParabolicModel& model, double T, std::size_t K)
{
    auto rep = verify_moments(plan, model, T, K);
    std::vector<cplx> out;
    for (const auto& r : rep.residuals)
        out.push_back(r.value);
    return out;
}

double eta(double s) { return s == 0 ? 1.0 : std::expm1(s) / s; }

double GramianControl::control(const Block2x2& b, double T, double time) const
{
    return -(b.b1 * std::exp(-b.lambda1 * (T - time)) * z[0] + b.b2 * std::exp(-b.lambda2 * (T - time)) * z[1]);
}

GramianControl gramian_control_2x2(const Block2x2& block, std::array<double, 2> y0, double T, std::size_t samples)
{
    if (!(T > 0))
        throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
    const Block2x2 b = Block2x2::make(block.lambda1, block.lambda2, block.b1, block.b2);
    GramianControl g;
    g.Q[0][0] = T * b.b1 * b.b1 * eta(-2 * T * b.lambda1);
    g.Q[0][1] = g.Q[1][0] = T * b.b1 * b.b2 * eta(-T * (b.lambda1 + b.lambda2));
    g.Q[1][1] = T * b.b2 * b.b2 * eta(-2 * T * b.lambda2);
    g.det = g.Q[0][0] * g.Q[1][1] - g.Q[0][1] * g.Q[1][0];
    g.trace = g.Q[0][0] + g.Q[1][1];
    const double half = g.trace / 2;
    const double big = half + std::sqrt(std::max(0.0, half * half - g.det));
    g.sigma = g.det / big;
    g.sigma_bounds_ok = g.det / g.trace <= g.sigma && g.sigma <= 2 * g.det / g.trace;

    const double e1 = std::exp(-b.lambda1 * T) * y0[0], e2 = std::exp(-b.lambda2 * T) * y0[1];
    g.z[0] = (g.Q[1][1] * e1 - g.Q[0][1] * e2) / g.det;
    g.z[1] = (g.Q[0][0] * e2 - g.Q[1][0] * e1) / g.det;
    g.norm2 = g.z[0] * e1 + g.z[1] * e2;
    const double ny2 = y0[0] * y0[0] + y0[1] * y0[1];
    if (ny2 > 0)
        g.bound_fit = g.norm2 / ((b.lambda1 + b.lambda2) * std::exp(-2 * b.lambda1 * T) * ny2);

    const std::size_t n = std::max<std::size_t>(samples, 2);
    g.t.resize(n);
    g.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.t[i] = T * double(i) / double(n - 1);
        g.u[i] = g.control(b, T, g.t[i]);
    }
    return g;
}

std::array<double, 2> rk4_terminal(const Block2x2& b, const GramianControl& g, std::array<double, 2> y, double T,
                                   double h)
{
    const long steps = std::max(1L, std::lround(T / h));
    const double dt = T / double(steps);
    auto f = [&](double t, const std::array<double, 2>& v) {
        const double u = g.control(b, T, t);
        return std::array<double, 2>{-b.lambda1 * v[0] + b.b1 * u, -b.lambda2 * v[1] + b.b2 * u};
    };
    double t = 0;
    for (long s = 0; s < steps; ++s) {
        auto k1 = f(t, y);
        auto k2 = f(t + dt / 2, {y[0] + dt / 2 * k1[0], y[1] + dt / 2 * k1[1]});
        auto k3 = f(t + dt / 2, {y[0] + dt / 2 * k2[0], y[1] + dt / 2 * k2[1]});
        auto k4 = f(t + dt, {y[0] + dt * k3[0], y[1] + dt * k3[1]});
        for (int i = 0; i < 2; ++i)
            y[std::size_t(i)] += dt / 6 * (k1[std::size_t(i)] + 2 * k2[std::size_t(i)] + 2 * k3[std::size_t(i)] + k4[std::size_t(i)]);
        t = double(s + 1) * dt;
    }
    return y;
}

} // namespace nullctl
