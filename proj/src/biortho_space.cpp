#include "nullctl/biortho_space.hpp"

#include <algorithm>
#include <cmath>

namespace nullctl {

VectorFamily VectorFamily::make(std::vector<std::vector<std::complex<double>>> vectors)
{
    VectorFamily f;
    if (vectors.empty())
        throw Error(ErrorCode::InvalidArgument, "empty vector family");
    f.dim = vectors.front().size();
    for (const auto& x : vectors)
        if (x.size() != f.dim)
            throw Error(ErrorCode::InvalidArgument, "vector family: coordinate lengths differ");
    if (vectors.size() > f.dim)
        throw Error(ErrorCode::DegenerateFamily, "vector family: more vectors than dimensions");
    f.v = std::move(vectors);
    return f;
}

std::complex<double> inner(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b)
{
    detail::Accum<double> acc;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc.add(to_cx(a[i]), to_cx(b[i]), 1.0);
    auto s = acc.value();
    return {s.re, s.im};
}

Matrix<std::complex<double>> gram(const VectorFamily& fam)
{
    const std::size_t r = fam.r();
    Matrix<std::complex<double>> G(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) {
            G(i, j) = inner(fam.v[i], fam.v[j]);
            G(j, i) = std::conj(G(i, j));
        }
    return G;
}

double smallest_eigenvalue(const Matrix<std::complex<double>>& G)
{
    return hermitian_eigenvalues(G, 1e-12).front();
}

SpatialDual biorthogonalize(const VectorFamily& fam)
{
    const std::size_t r = fam.r();
    const auto G = gram(fam);
    const double s2 = smallest_eigenvalue(G);
    if (!(s2 > degeneracy_tol))
        throw Error(ErrorCode::DegenerateFamily,
                    "observation family is numerically dependent (sigma^2 = " + std::to_string(s2) + ")");
    const auto Gi = small_hpd_inverse(G);

    SpatialDual out;
    out.sigma = std::sqrt(s2);
    out.bound = std::sqrt(double(r)) / out.sigma;
    // w_j = sum_m (G^{-1})_jm v_m; <v_i, w_j> = (G G^{-1})_ij since G^{-1} is Hermitian
    out.combination = Gi;
    out.w.assign(r, std::vector<std::complex<double>>(fam.dim));
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t m = 0; m < r; ++m) {
            const auto c = Gi(j, m);
            for (std::size_t a = 0; a < fam.dim; ++a)
                out.w[j][a] += c * fam.v[m][a];
        }
    out.bound_ok = true;
    for (std::size_t j = 0; j < r; ++j) {
        out.norms.push_back(std::sqrt(std::real(inner(out.w[j], out.w[j]))));
        if (out.norms.back() > out.bound + 1e-10)
            out.bound_ok = false;
        for (std::size_t i = 0; i < r; ++i) {
            const double target = i == j ? 1.0 : 0.0;
            out.residual = std::max(out.residual, std::abs(inner(fam.v[i], out.w[j]) - target));
        }
    }
    return out;
}

} // namespace nullctl
