#include "nullctl/biortho_time.hpp"

#include "nullctl/error.hpp"

#include <algorithm>
#include <cmath>

namespace nullctl {

namespace {

xreal factorial(int n)
{
    xreal f = 1;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

xcomplex pow_int(xcomplex z, int n)
{
    xcomplex r(xreal(1));
    for (int i = 0; i < n; ++i)
        r *= z;
    return r;
}

Matrix<cplx> to_double(const Matrix<xcomplex>& A)
{
    Matrix<cplx> out(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            out(i, j) = to_std(A(i, j));
    return out;
}

} // namespace

xcomplex extended_rate(const SpectralEntry& e)
{
    xcomplex r(xreal(e.base.real()), xreal(e.base.imag()));
    if (e.offset_sign != 0)
        r.re += xreal(e.offset_sign) * exp(xreal(e.log_offset));
    return r;
}

ExponentialSpan ExponentialSpan::mixed(std::vector<xcomplex> rates, std::vector<int> chain, std::optional<double> T)
{
    if (rates.empty())
        throw Error(ErrorCode::InvalidSpan, "exponential span needs at least one rate");
    if (chain.size() != rates.size())
        throw Error(ErrorCode::InvalidSpan, "chain lengths do not match rates");
    if (T && !(*T > 0))
        throw Error(ErrorCode::InvalidSpan, "horizon must be positive");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i].re > 0))
            throw Error(ErrorCode::InvalidSpan, "rate " + std::to_string(i + 1) + " has Re <= 0");
        if (chain[i] != 1 && chain[i] != 2)
            throw Error(ErrorCode::InvalidSpan, "chain length must be 1 or 2");
        for (std::size_t j = 0; j < i; ++j)
            if (rates[i].re == rates[j].re && rates[i].im == rates[j].im)
                throw Error(ErrorCode::InvalidSpan, "rates " + std::to_string(j + 1) + " and " +
                                                        std::to_string(i + 1) + " coincide");
    }
    ExponentialSpan s;
    s.rates = std::move(rates);
    s.chain = std::move(chain);
    s.horizon = T;
    return s;
}

ExponentialSpan ExponentialSpan::from_extended(std::vector<xcomplex> rates, std::optional<double> T, bool jordan)
{
    std::vector<int> chain(rates.size(), jordan ? 2 : 1);
    return mixed(std::move(rates), std::move(chain), T);
}

ExponentialSpan ExponentialSpan::make(const std::vector<cplx>& rates, std::optional<double> T, bool jordan)
{
    std::vector<xcomplex> x;
    x.reserve(rates.size());
    for (auto r : rates)
        x.push_back(to_x(r));
    return from_extended(std::move(x), T, jordan);
}

bool ExponentialSpan::jordan() const
{
    return !chain.empty() && std::all_of(chain.begin(), chain.end(), [](int c) { return c == 2; });
}

std::size_t ExponentialSpan::dim() const
{
    std::size_t n = 0;
    for (int c : chain)
        n += std::size_t(c);
    return n;
}

std::vector<ExponentialSpan::BasisFn> ExponentialSpan::basis() const
{
    std::vector<BasisFn> b;
    for (std::size_t r = 0; r < rates.size(); ++r)
        for (int a = 0; a < chain[r]; ++a)
            b.push_back({r, a});
    return b;
}

std::size_t ExponentialSpan::offset_of(std::size_t r) const
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < r; ++i)
        n += std::size_t(chain[i]);
    return n;
}

xcomplex moment_integral(const xcomplex& s, int a, std::optional<double> T)
{
    if (!T) {
        if (!(s.re > 0))
            throw Error(ErrorCode::InvalidSpan, "infinite horizon needs Re(s) > 0");
        return xcomplex(factorial(a)) / pow_int(s, a + 1);
    }
    const xreal Tx(*T);
    const xcomplex sT = s * xcomplex(Tx);
    if (abs(sT) < xreal(1)) {
        // T^{a+1} sum_n (-sT)^n / (n! (a+n+1))
        xcomplex term(xreal(1)); // (-sT)^n / n!
        xcomplex sum;
        const xreal eps = std::numeric_limits<xreal>::epsilon();
        for (int n = 0; n < 400; ++n) {
            xcomplex t = term / xcomplex(xreal(a + n + 1));
            sum += t;
            if (abs(t) <= eps * abs(sum))
                break;
            term = term * (-sT) / xcomplex(xreal(n + 1));
        }
        xreal Ta = 1;
        for (int i = 0; i <= a; ++i)
            Ta *= Tx;
        return sum * xcomplex(Ta);
    }
    // a!/s^{a+1} (1 - e^{-sT} sum_{i<=a} (sT)^i / i!)
    xcomplex partial, pw(xreal(1));
    for (int i = 0; i <= a; ++i) {
        partial += pw / xcomplex(factorial(i));
        pw *= sT;
    }
    xcomplex tail = exp(-sT) * partial;
    return xcomplex(factorial(a)) / pow_int(s, a + 1) * (xcomplex(xreal(1)) - tail);
}

Matrix<xcomplex> exp_gram_x(const ExponentialSpan& span)
{
    auto b = span.basis();
    const std::size_t n = b.size();
    Matrix<xcomplex> G(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            xcomplex s = conj(span.rates[b[i].rate]) + span.rates[b[j].rate];
            G(i, j) = moment_integral(s, b[i].power + b[j].power, span.horizon);
            G(j, i) = conj(G(i, j));
        }
    return G;
}

Matrix<cplx> exp_gram(const ExponentialSpan& span) { return to_double(exp_gram_x(span)); }

BiorthogonalFamily build_biortho(const ExponentialSpan& span, Precision precision)
{
    BiorthogonalFamily f;
    f.span = span;
    f.precision = precision;
    f.gram = exp_gram_x(span);
    const std::size_t n = f.gram.rows();
    auto inv = hpd_inverse(f.gram, precision);

    f.coeffs = Matrix<xcomplex>(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m)
            f.coeffs(k, m) = inv.inverse(m, k);

    // <b_j, q_k> = conj((G G^-1)_jk)
    xreal res = 0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            xcomplex s;
            for (std::size_t m = 0; m < n; ++m)
                s += f.gram(j, m) * inv.inverse(m, k);
            if (j == k)
                s.re -= 1;
            res = std::max(res, static_cast<xreal>(abs(s)));
        }
    f.residual = static_cast<double>(res);

    f.norms.resize(n);
    double consistency = 0;
    for (std::size_t k = 0; k < n; ++k) {
        xcomplex q;
        for (std::size_t m = 0; m < n; ++m) {
            xcomplex row;
            for (std::size_t l = 0; l < n; ++l)
                row += f.gram(m, l) * f.coeffs(k, l);
            q += conj(f.coeffs(k, m)) * row;
        }
        f.norms[k] = std::sqrt(std::max(0.0, static_cast<double>(q.re)));
        xreal diag = f.coeffs(k, k).re;
        if (q.re > 0)
            consistency = std::max(consistency, static_cast<double>(abs(diag - q.re) / q.re));
    }
    f.norm_consistency = consistency;
    f.cond_estimate = largest_eigenvalue(to_double(f.gram)) * largest_eigenvalue(to_double(inv.inverse));
    f.degraded = f.residual > default_residual_threshold || consistency > 1e-6;
    return f;
}

BiorthogonalFamily build_biortho_jordan(const ExponentialSpan& span, Precision precision)
{
    if (!span.jordan())
        throw Error(ErrorCode::InvalidSpan, "build_biortho_jordan needs a span with t e^{-lt} companions");
    return build_biortho(span, precision);
}

NormGrowthFit norm_growth_fit(const BiorthogonalFamily& family, double c_est, int window, double slack)
{
    NormGrowthFit fit;
    const auto& span = family.span;
    const std::size_t nr = span.rates.size();
    fit.slack = slack;
    bool any_chain = std::any_of(span.chain.begin(), span.chain.end(), [](int c) { return c == 2; });
    fit.bound = any_chain ? 4 * c_est : c_est;
    if (nr < 2) {
        fit.degenerate = true;
        return fit;
    }
    std::size_t from = nr > std::size_t(window) ? nr - std::size_t(window) : 0;
    std::vector<double> x, y;
    for (std::size_t r = from; r < nr; ++r) {
        double nmax = 0;
        std::size_t off = span.offset_of(r);
        for (int a = 0; a < span.chain[r]; ++a)
            nmax = std::max(nmax, family.norms[off + std::size_t(a)]);
        x.push_back(static_cast<double>(span.rates[r].re));
        y.push_back(std::log(nmax));
    }
    fit.points = x.size();
    fit.slope = ls_slope(x, y);
    if (std::isnan(fit.slope)) {
        fit.degenerate = true;
        return fit;
    }
    fit.consistent = fit.slope <= fit.bound + slack;
    return fit;
}

Matrix<xcomplex> cauchy_inverse_oracle(const std::vector<xcomplex>& rates)
{
    // C_ij = 1/(x_i + y_j), x = conj(l), y = l:
    // (C^-1)_ij = prod_k (x_j + y_k)(x_k + y_i) / ((x_j + y_i) prod_{k!=j}(x_j - x_k) prod_{k!=i}(y_i - y_k))
    const std::size_t n = rates.size();
    std::vector<xcomplex> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = conj(rates[i]);
        y[i] = rates[i];
    }
    Matrix<xcomplex> inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            xcomplex num(xreal(1)), den = x[j] + y[i];
            for (std::size_t k = 0; k < n; ++k) {
                num *= (x[j] + y[k]) * (x[k] + y[i]);
                if (k != j)
                    den *= x[j] - x[k];
                if (k != i)
                    den *= y[i] - y[k];
            }
            inv(i, j) = num / den;
        }
    return inv;
}

std::vector<xcomplex> pair_with_exponential(const BiorthogonalFamily& family, const xcomplex& mu, int a)
{
    if (a < 0)
        throw Error(ErrorCode::InvalidArgument, "pair_with_exponential: negative power");
    auto b = family.span.basis();
    const std::size_t n = b.size();
    std::vector<xcomplex> I(n);
    for (std::size_t m = 0; m < n; ++m)
        I[m] = moment_integral(mu + conj(family.span.rates[b[m].rate]), a + b[m].power, family.span.horizon);
    std::vector<xcomplex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        xcomplex s;
        for (std::size_t m = 0; m < n; ++m)
            s += conj(family.coeffs(k, m)) * I[m];
        out[k] = s;
    }
    return out;
}

xreal combination_norm2(const BiorthogonalFamily& family, const std::vector<xcomplex>& w)
{
    const std::size_t n = family.coeffs.rows();
    std::vector<xcomplex> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (is_zero(w[k]))
            continue;
        for (std::size_t m = 0; m < n; ++m)
            u[m] += w[k] * family.coeffs(k, m);
    }
    xcomplex s;
    for (std::size_t m = 0; m < n; ++m) {
        xcomplex row;
        for (std::size_t l = 0; l < n; ++l)
            row += family.gram(m, l) * u[l];
        s += conj(u[m]) * row;
    }
    return s.re;
}

cplx evaluate_dual(const BiorthogonalFamily& family, std::size_t k, double t)
{
    // coefficients can be huge with heavy cancellation; sum in extended precision
    auto b = family.span.basis();
    const xreal tx(t);
    xcomplex s;
    for (std::size_t m = 0; m < b.size(); ++m) {
        xcomplex e = exp(-family.span.rates[b[m].rate] * xcomplex(tx));
        if (b[m].power == 1)
            e *= xcomplex(tx);
        s += family.coeffs(k, m) * e;
    }
    return to_std(s);
}

} // namespace nullctl
