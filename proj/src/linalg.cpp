#include "nullctl/linalg.hpp"

#include <algorithm>

namespace nullctl {

namespace {

xreal max_abs(const std::vector<xcomplex>& v)
{
    xreal m = 0;
    for (const auto& z : v)
        m = std::max(m, static_cast<xreal>(abs(z)));
    return m;
}

} // namespace

InverseResult hpd_inverse(const Matrix<xcomplex>& A, Precision mode)
{
    const std::size_t n = A.rows();
    InverseResult res;
    res.inverse = Matrix<xcomplex>(n, n);

    if (mode == Precision::Extended) {
        auto f = factor_hpd(A);
        res.min_pivot_ratio = static_cast<double>(f.min_pivot / f.max_diag);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<xcomplex> e(n);
            e[j] = xcomplex(xreal(1));
            auto x = solve_factored(f, e);
            for (std::size_t i = 0; i < n; ++i)
                res.inverse(i, j) = x[i];
        }
        return res;
    }

    auto Ad = convert<double>(A);
    auto f = factor_hpd(Ad);
    res.min_pivot_ratio = f.min_pivot / f.max_diag;
    constexpr int max_refine = 4;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Cx<double>> e(n);
        e[j] = Cx<double>(1.0);
        auto xd = solve_factored(f, e);
        std::vector<xcomplex> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = xcomplex(xreal(xd[i].re), xreal(xd[i].im));
        for (int it = 0; it < max_refine; ++it) {
            std::vector<Cx<double>> r(n);
            for (std::size_t i = 0; i < n; ++i) {
                xcomplex acc = (i == j) ? xcomplex(xreal(1)) : xcomplex();
                for (std::size_t m = 0; m < n; ++m)
                    acc -= A(i, m) * x[m];
                r[i] = Cx<double>(static_cast<double>(acc.re), static_cast<double>(acc.im));
            }
            auto dx = solve_factored(f, r);
            std::vector<xcomplex> dxx(n);
            for (std::size_t i = 0; i < n; ++i) {
                dxx[i] = xcomplex(xreal(dx[i].re), xreal(dx[i].im));
                x[i] += dxx[i];
            }
            if (j == 0)
                res.refinement_steps = it + 1;
            if (max_abs(dxx) <= xreal(1e-30) * max_abs(x))
                break;
        }
        for (std::size_t i = 0; i < n; ++i)
            res.inverse(i, j) = x[i];
    }
    return res;
}

double largest_eigenvalue(const Matrix<std::complex<double>>& A)
{
    const std::size_t n = A.rows();
    if (n == 0)
        return 0;
    std::vector<std::complex<double>> v(n), w(n);
    // deterministic start with components in every direction
    for (std::size_t i = 0; i < n; ++i)
        v[i] = 1.0 / std::sqrt(double(n)) * (1.0 + 0.1 * double(i) / double(n));
    double lam = 0;
    for (int it = 0; it < 500; ++it) {
        double nrm = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> s = 0;
            for (std::size_t j = 0; j < n; ++j)
                s += A(i, j) * v[j];
            w[i] = s;
            nrm += std::norm(s);
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0)
            return 0;
        double prev = lam;
        lam = nrm;
        for (std::size_t i = 0; i < n; ++i)
            v[i] = w[i] / nrm;
        if (it > 5 && std::abs(lam - prev) <= 1e-14 * lam)
            break;
    }
    return lam;
}

std::vector<double> symmetric_eigenvalues(Matrix<double> A, double rel_tol)
{
    const std::size_t n = A.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(A(i, j) - A(j, i)) > 1e-12 * (std::abs(A(i, j)) + std::abs(A(j, i)) + 1e-300))
                throw Error(ErrorCode::NotHermitian, "matrix is not symmetric");

    auto off = [&] {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    s += A(i, j) * A(i, j);
        return s;
    };
    double fro = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            fro += A(i, j) * A(i, j);

    for (int sweep = 0; sweep < 100 && off() > rel_tol * rel_tol * fro; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = A(p, q);
                if (apq == 0)
                    continue;
                double theta = (A(q, q) - A(p, p)) / (2 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        ev[i] = A(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> hermitian_eigenvalues(const Matrix<std::complex<double>>& H, double rel_tol)
{
    const std::size_t n = H.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double scale = std::abs(H(i, j)) + std::abs(H(j, i)) + 1e-300;
            if (std::abs(H(i, j) - std::conj(H(j, i))) > 1e-12 * scale)
                throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian");
        }
    Matrix<double> E(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double re = 0.5 * (H(i, j).real() + H(j, i).real());
            double im = 0.5 * (H(i, j).imag() - H(j, i).imag());
            E(i, j) = re;
            E(i + n, j + n) = re;
            E(i, j + n) = -im;
            E(i + n, j) = im;
        }
    auto ev = symmetric_eigenvalues(E, rel_tol);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
    return out;
}

Matrix<std::complex<double>> small_hpd_inverse(const Matrix<std::complex<double>>& A)
{
    const std::size_t n = A.rows();
    Matrix<Cx<double>> Ac(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            Ac(i, j) = to_cx(A(i, j));
    auto f = factor_hpd(Ac);
    Matrix<std::complex<double>> inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Cx<double>> e(n);
        e[j] = Cx<double>(1.0);
        auto x = solve_factored(f, e);
        for (std::size_t i = 0; i < n; ++i)
            inv(i, j) = to_std(x[i]);
    }
    return inv;
}

} // namespace nullctl
