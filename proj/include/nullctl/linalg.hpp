#pragma once

// Small dense linear algebra: row-major matrices, a diagonally pivoted
// LDL^H factorization for Hermitian positive definite systems, and
// Jacobi eigenvalues for the tiny Gram matrices of spatial families.

#include "nullctl/error.hpp"
#include "nullctl/xprec.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace nullctl {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

namespace detail {

// Accumulates sum of a*conj(b)*w. The double specialization carries
// error terms (TwoSum / FMA TwoProduct) so the result is as if computed
// in twice the working precision.
template <class R>
struct Accum {
    Cx<R> s;
    void add(const Cx<R>& a, const Cx<R>& b, const R& w)
    {
        s += a * conj(b) * Cx<R>(w);
    }
    void add(const Cx<R>& a) { s += a; }
    Cx<R> value() const { return s; }
};

struct CompSum {
    double s = 0, c = 0;
    void add(double x)
    {
        double t = s + x;
        double bp = t - s;
        c += (s - (t - bp)) + (x - bp);
        s = t;
    }
    void add_prod(double a, double b)
    {
        double p = a * b;
        double e = std::fma(a, b, -p);
        add(p);
        c += e;
    }
    double value() const { return s + c; }
};

template <>
struct Accum<double> {
    CompSum re, im;
    void add(const Cx<double>& a, const Cx<double>& b, double w)
    {
        // a*conj(b) = (ar*br + ai*bi) + i(ai*br - ar*bi)
        re.add_prod(a.re * w, b.re);
        re.add_prod(a.im * w, b.im);
        im.add_prod(a.im * w, b.re);
        im.add_prod(-a.re * w, b.im);
    }
    void add(const Cx<double>& a)
    {
        re.add(a.re);
        im.add(a.im);
    }
    Cx<double> value() const { return {re.value(), im.value()}; }
};

} // namespace detail

/// P A P^T = L D L^H with unit lower triangular L and positive D.
template <class R>
struct HermitianFactor {
    std::vector<std::size_t> perm;
    Matrix<Cx<R>> L;
    std::vector<R> d;
    R min_pivot{0};
    R max_diag{0};
};

/// Diagonally pivoted factorization of a Hermitian positive definite
/// matrix. Throws IllConditioned once the largest remaining pivot drops
/// below n*eps*max|A_ii| (eps of the working type R).
template <class R>
HermitianFactor<R> factor_hpd(const Matrix<Cx<R>>& A)
{
    using std::abs;
    const std::size_t n = A.rows();
    if (A.cols() != n)
        throw Error(ErrorCode::InvalidArgument, "factor_hpd: matrix not square");
    HermitianFactor<R> f;
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
    f.L = Matrix<Cx<R>>(n, n);
    f.d.assign(n, R(0));
    for (std::size_t i = 0; i < n; ++i)
        if (A(i, i).re > f.max_diag)
            f.max_diag = A(i, i).re;
    const R thresh = R(double(n)) * std::numeric_limits<R>::epsilon() * f.max_diag;
    f.min_pivot = f.max_diag;

    std::vector<R> diag(n);
    for (std::size_t s = 0; s < n; ++s) {
        // updated diagonal of the trailing block
        std::size_t best = s;
        for (std::size_t i = s; i < n; ++i) {
            detail::Accum<R> acc;
            acc.add(A(f.perm[i], f.perm[i]));
            for (std::size_t m = 0; m < s; ++m)
                acc.add(-f.L(i, m), f.L(i, m), f.d[m]);
            diag[i] = acc.value().re;
            if (diag[i] > diag[best])
                best = i;
        }
        if (best != s) {
            std::swap(f.perm[s], f.perm[best]);
            std::swap(diag[s], diag[best]);
            for (std::size_t m = 0; m < s; ++m)
                std::swap(f.L(s, m), f.L(best, m));
        }
        if (!(diag[s] > thresh))
            throw Error(ErrorCode::IllConditioned,
                        "Gram factorization: pivot " + std::to_string(static_cast<double>(diag[s])) +
                            " at step " + std::to_string(s) + " of " + std::to_string(n) +
                            " is below threshold; reduce N or use extended precision");
        f.d[s] = diag[s];
        if (diag[s] < f.min_pivot)
            f.min_pivot = diag[s];
        f.L(s, s) = Cx<R>(R(1));
        for (std::size_t i = s + 1; i < n; ++i) {
            detail::Accum<R> acc;
            acc.add(A(f.perm[i], f.perm[s]));
            for (std::size_t m = 0; m < s; ++m)
                acc.add(-f.L(i, m), f.L(s, m), f.d[m]);
            Cx<R> v = acc.value();
            f.L(i, s) = Cx<R>(v.re / f.d[s], v.im / f.d[s]);
        }
    }
    return f;
}

template <class R>
std::vector<Cx<R>> solve_factored(const HermitianFactor<R>& f, const std::vector<Cx<R>>& b)
{
    const std::size_t n = f.perm.size();
    std::vector<Cx<R>> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        detail::Accum<R> acc;
        acc.add(b[f.perm[i]]);
        for (std::size_t m = 0; m < i; ++m)
            acc.add(-f.L(i, m) * y[m]);
        y[i] = acc.value();
    }
    for (std::size_t i = 0; i < n; ++i)
        y[i] = Cx<R>(y[i].re / f.d[i], y[i].im / f.d[i]);
    for (std::size_t ii = n; ii-- > 0;) {
        detail::Accum<R> acc;
        acc.add(y[ii]);
        for (std::size_t m = ii + 1; m < n; ++m)
            acc.add(-conj(f.L(m, ii)) * y[m]);
        y[ii] = acc.value();
    }
    std::vector<Cx<R>> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[f.perm[i]] = y[i];
    return x;
}

template <class To, class From>
Matrix<Cx<To>> convert(const Matrix<Cx<From>>& A)
{
    Matrix<Cx<To>> out(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            out(i, j) = Cx<To>(static_cast<To>(A(i, j).re), static_cast<To>(A(i, j).im));
    return out;
}

template <class R>
Matrix<Cx<R>> conj_transpose(const Matrix<Cx<R>>& A)
{
    Matrix<Cx<R>> out(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            out(j, i) = conj(A(i, j));
    return out;
}

template <class R>
Matrix<Cx<R>> multiply(const Matrix<Cx<R>>& A, const Matrix<Cx<R>>& B)
{
    Matrix<Cx<R>> out(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const Cx<R>& a = A(i, k);
            if (is_zero(a))
                continue;
            for (std::size_t j = 0; j < B.cols(); ++j)
                out(i, j) += a * B(k, j);
        }
    return out;
}

enum class Precision { Standard, Extended };

struct InverseResult {
    Matrix<xcomplex> inverse;
    double min_pivot_ratio = 0; ///< smallest pivot over largest diagonal
    int refinement_steps = 0;
};

/// Inverse of a Hermitian positive definite matrix given in extended
/// precision. Standard mode factors the double rounding of A (compensated
/// accumulation) and refines each column with extended residuals;
/// Extended mode factors A directly in extended precision.
InverseResult hpd_inverse(const Matrix<xcomplex>& A, Precision mode);

/// Largest eigenvalue of a Hermitian positive semidefinite matrix by power
/// iteration.
double largest_eigenvalue(const Matrix<std::complex<double>>& A);

/// Eigenvalues (ascending) of a real symmetric matrix, cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(Matrix<double> A, double rel_tol = 1e-14);

/// Eigenvalues (ascending) of a Hermitian matrix through its real
/// 2n x 2n embedding [[Re, -Im], [Im, Re]].
std::vector<double> hermitian_eigenvalues(const Matrix<std::complex<double>>& H, double rel_tol = 1e-14);

/// Inverse of a small Hermitian matrix in double via the pivoted factorization.
Matrix<std::complex<double>> small_hpd_inverse(const Matrix<std::complex<double>>& A);

} // namespace nullctl
