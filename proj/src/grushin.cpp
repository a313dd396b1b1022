#include "nullctl/grushin.hpp"

#include "nullctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace nullctl {

namespace {

constexpr double pi = std::numbers::pi;

struct Grid {
    std::size_t m = 0; // interior nodes
    double h = 0;
    std::vector<double> x;
    std::vector<double> diag; // h^2 * (2/h^2 + (n pi x)^2)
};

Grid make_grid(long n, double h)
{
    if (n < 1)
        throw Error(ErrorCode::InvalidArgument, "cross-section index n must be >= 1");
    if (!(h > 0) || h > 1e-3 + 1e-15)
        throw Error(ErrorCode::InvalidArgument, "grid step must lie in (0, 1e-3]");
    Grid g;
    const long cells = std::lround(2 / h);
    g.h = 2.0 / double(cells);
    g.m = std::size_t(cells - 1);
    g.x.resize(g.m);
    g.diag.resize(g.m);
    const double w = double(n) * pi * g.h;
    for (std::size_t i = 0; i < g.m; ++i) {
        g.x[i] = -1 + double(i + 1) * g.h;
        g.diag[i] = 2 + w * w * g.x[i] * g.x[i];
    }
    return g;
}

// number of eigenvalues of the scaled matrix below s (off-diagonals -1)
std::size_t sturm_count(const Grid& g, double s)
{
    std::size_t neg = 0;
    double q = 1;
    for (std::size_t i = 0; i < g.m; ++i) {
        q = g.diag[i] - s - (i ? 1 / q : 0);
        if (q == 0)
            q = 1e-300;
        if (q < 0)
            ++neg;
    }
    return neg;
}

double bisect_smallest(const Grid& g, long n)
{
    const double h2 = g.h * g.h;
    double lo = 0; // the matrix is positive definite
    double hi = (double(n) * pi + 10) * h2;
    while (sturm_count(g, hi) < 1)
        hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(g, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi) / h2;
}

// (T - s) y = r with T - s positive definite; Thomas algorithm
std::vector<double> thomas(const Grid& g, double s, const std::vector<double>& r)
{
    const std::size_t m = g.m;
    std::vector<double> c(m), y(m);
    double b = g.diag[0] - s;
    c[0] = -1 / b;
    y[0] = r[0] / b;
    for (std::size_t i = 1; i < m; ++i) {
        b = g.diag[i] - s + c[i - 1];
        c[i] = -1 / b;
        y[i] = (r[i] + y[i - 1]) / b;
    }
    for (std::size_t i = m - 1; i-- > 0;)
        y[i] -= c[i] * y[i + 1];
    return y;
}

double log_trapezoid(const std::vector<double>& logf, double h)
{
    double M = -std::numeric_limits<double>::infinity();
    for (double f : logf)
        M = std::max(M, f);
    if (!std::isfinite(M))
        return M;
    double s = 0;
    for (std::size_t i = 0; i < logf.size(); ++i) {
        double w = (i == 0 || i + 1 == logf.size()) ? 0.5 : 1.0;
        s += w * std::exp(logf[i] - M);
    }
    return M + std::log(s * h);
}

} // namespace

double smallest_eigenvalue_fd(long n, double h) { return bisect_smallest(make_grid(n, h), n); }

CrossSectionMode solve_mode(long n, double h)
{
    Grid g = make_grid(n, h);
    CrossSectionMode mode;
    mode.n = n;
    mode.h = g.h;
    mode.lambda = bisect_smallest(g, n);

    const double lam_half = smallest_eigenvalue_fd(n, g.h / 2);
    mode.richardson_rel = std::abs(mode.lambda - lam_half) / mode.lambda;
    if (4.0 / 3.0 * mode.richardson_rel > 1e-4)
        throw Error(ErrorCode::GridTooCoarse, "cross-section n = " + std::to_string(n) +
                                                  ": discretization error estimate exceeds 1e-4 lambda");

    const double h2 = g.h * g.h;
    const double shift = mode.lambda * h2 * (1 - 1e-8);
    std::vector<double> v(g.m, 1.0);
    for (int it = 0; it < 2; ++it) {
        v = thomas(g, shift, v);
        double mx = *std::max_element(v.begin(), v.end());
        for (double& t : v)
            t /= mx;
    }

    // ln v from ratios s_i = v_{i-1}/v_i, computed inward from both ends
    const std::size_t m = g.m, c = m / 2;
    const double sig = mode.lambda * h2;
    std::vector<double> lv(m, 0.0);
    {
        std::vector<double> s(m);
        s[m - 1] = g.diag[m - 1] - sig;
        for (std::size_t i = m - 1; i-- > c + 1;)
            s[i] = g.diag[i] - sig - 1 / s[i + 1];
        for (std::size_t i = c + 1; i < m; ++i)
            lv[i] = lv[i - 1] - std::log(s[i]);
        // left half: r_i = v_{i+1}/v_i
        std::vector<double> r(m);
        r[0] = g.diag[0] - sig;
        for (std::size_t i = 1; i < c; ++i)
            r[i] = g.diag[i] - sig - 1 / r[i - 1];
        for (std::size_t i = c; i-- > 0;)
            lv[i] = lv[i + 1] - std::log(r[i]);
    }

    // normalization: int v^2 = 1 with v = 0 at x = +-1
    std::vector<double> lf(m + 2, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < m; ++i)
        lf[i + 1] = 2 * lv[i];
    const double log_norm2 = log_trapezoid(lf, g.h);
    for (double& t : lv)
        t -= 0.5 * log_norm2;

    double n2 = 0;
    for (double t : v)
        n2 += t * t * g.h;
    const double scale = 1 / std::sqrt(n2);
    for (double& t : v)
        t *= scale;

    mode.x = std::move(g.x);
    mode.v = std::move(v);
    mode.log_v = std::move(lv);
    return mode;
}

double log_observation_integral(const CrossSectionMode& mode, double a, double b)
{
    if (!(a >= -1 && b <= 1 && a <= b))
        throw Error(ErrorCode::InvalidArgument, "observation interval must satisfy -1 <= a <= b <= 1");
    if (a == b)
        return -std::numeric_limits<double>::infinity();
    const double h = mode.h;
    const std::size_t m = mode.x.size();
    // node j <-> x = -1 + j h, j = 0..m+1, log v = -inf at the ends
    auto logf = [&](long j) {
        if (j <= 0 || j >= long(m) + 1)
            return -std::numeric_limits<double>::infinity();
        return 2 * mode.log_v[std::size_t(j - 1)];
    };
    auto at = [&](double x) {
        double t = (x + 1) / h;
        long j = long(std::floor(t));
        double f = t - double(j);
        double l0 = logf(j), l1 = logf(j + 1);
        if (f < 1e-12)
            return l0;
        if (f > 1 - 1e-12)
            return l1;
        if (!std::isfinite(l0) || !std::isfinite(l1))
            return std::log((1 - f) * std::exp(l0) + f * std::exp(l1));
        return (1 - f) * l0 + f * l1;
    };
    // trapezoid on [a, b] using the nodes inside plus the interpolated ends
    std::vector<double> xs, ls;
    xs.push_back(a);
    ls.push_back(at(a));
    long j0 = long(std::floor((a + 1) / h + 1e-9)) + 1, j1 = long(std::ceil((b + 1) / h - 1e-9)) - 1;
    for (long j = j0; j <= j1; ++j) {
        double x = -1 + double(j) * h;
        if (x > a + 1e-12 * h && x < b - 1e-12 * h) {
            xs.push_back(x);
            ls.push_back(logf(j));
        }
    }
    xs.push_back(b);
    ls.push_back(at(b));
    double M = *std::max_element(ls.begin(), ls.end());
    if (!std::isfinite(M))
        return M;
    double s = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        s += 0.5 * (xs[i + 1] - xs[i]) * (std::exp(ls[i] - M) + std::exp(ls[i + 1] - M));
    return M + std::log(s);
}

double observation_integral_direct(const CrossSectionMode& mode, double a, double b)
{
    if (!(a >= -1 && b <= 1 && a <= b))
        throw Error(ErrorCode::InvalidArgument, "observation interval must satisfy -1 <= a <= b <= 1");
    const double h = mode.h;
    const std::size_t m = mode.x.size();
    auto f = [&](long j) {
        if (j <= 0 || j >= long(m) + 1)
            return 0.0;
        double v = mode.v[std::size_t(j - 1)];
        return v * v;
    };
    auto at = [&](double x) {
        double t = (x + 1) / h;
        long j = long(std::floor(t));
        double w = t - double(j);
        return (1 - w) * f(j) + w * f(j + 1);
    };
    double s = 0, xp = a, fp = at(a);
    long j0 = long(std::floor((a + 1) / h + 1e-9)) + 1, j1 = long(std::ceil((b + 1) / h - 1e-9)) - 1;
    for (long j = j0; j <= j1; ++j) {
        double x = -1 + double(j) * h;
        if (x > a + 1e-12 * h && x < b - 1e-12 * h) {
            s += 0.5 * (x - xp) * (fp + f(j));
            xp = x;
            fp = f(j);
        }
    }
    s += 0.5 * (b - xp) * (fp + at(b));
    return s;
}

double observation_integral(const CrossSectionMode& mode, double a, double b)
{
    // the inverse-iteration samples carry absolute errors near 1e-16 max|v|, so tail masses
    // come from the ratio recurrence in every case
    return std::exp(log_observation_integral(mode, a, b));
}

double grushin_tn(const CrossSectionMode& mode, double a, double b)
{
    const double li = log_observation_integral(mode, a, b);
    return (-(std::log(2.0) + li) + std::log(mode.lambda)) / (2 * mode.lambda);
}

ProfileReport grushin_tstar_profile(double a, double b, long n_lo, long n_hi, double h, int window, double cap)
{
    if (!(0 < a && a <= b && b <= 1))
        throw Error(ErrorCode::InvalidArgument, "grushin profile needs 0 < a <= b <= 1");
    if (n_lo < 1 || n_hi < n_lo)
        throw Error(ErrorCode::InvalidArgument, "grushin profile needs 1 <= n_lo <= n_hi");
    const std::size_t count = std::size_t(n_hi - n_lo + 1);
    std::vector<double> tn(count), lam(count);
    // modes are independent; results do not depend on the scheduling
    std::vector<std::future<void>> jobs;
    const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    for (unsigned w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                auto mode = solve_mode(n_lo + long(i), h);
                tn[i] = grushin_tn(mode, a, b);
                lam[i] = mode.lambda;
            }
        }));
    for (auto& j : jobs)
        j.get();
    std::vector<long> ks(count);
    for (std::size_t i = 0; i < count; ++i)
        ks[i] = n_lo + long(i);
    auto p = make_profile(ks, tn, window, cap);
    p.re_lambda = lam;
    return p;
}

} // namespace nullctl
