#include "doctest.h"

#include "nullctl/biortho_space.hpp"
#include "nullctl/error.hpp"

#include <cmath>
#include <random>

using namespace nullctl;
using C = std::complex<double>;
using Vec = std::vector<C>;

namespace {

const double s2 = std::sqrt(2.0);

// Gauss-Jordan with partial pivoting, independent of the library factorization.
std::vector<Vec> brute_inverse(std::vector<Vec> a)
{
    const std::size_t n = a.size();
    std::vector<Vec> inv(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < n; ++i)
            if (std::abs(a[i][c]) > std::abs(a[p][c]))
                p = i;
        std::swap(a[c], a[p]);
        std::swap(inv[c], inv[p]);
        const C piv = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (i != c) {
                const C f = a[i][c];
                for (std::size_t j = 0; j < n; ++j) {
                    a[i][j] -= f * a[c][j];
                    inv[i][j] -= f * inv[c][j];
                }
            }
    }
    return inv;
}

VectorFamily random_family(std::mt19937_64& rng, std::size_t r, std::size_t dim)
{
    std::normal_distribution<double> N;
    std::vector<Vec> v(r, Vec(dim));
    for (auto& x : v)
        for (auto& c : x)
            c = {N(rng), N(rng)};
    return VectorFamily::make(v);
}

} // namespace

TEST_CASE("gram examples")
{
    auto G = gram(VectorFamily::make({{1, 0}, {0, 1}}));
    CHECK(G(0, 0) == C(1));
    CHECK(G(0, 1) == C(0));
    G = gram(VectorFamily::make({{1, 0}, {1 / s2, 1 / s2}}));
    CHECK(G(0, 1).real() == doctest::Approx(1 / s2));
    CHECK(G(1, 1).real() == doctest::Approx(1));
    G = gram(VectorFamily::make({{0.6, 0.8}}));
    CHECK(G(0, 0).real() == doctest::Approx(1));
}

TEST_CASE("smallest eigenvalue")
{
    CHECK(smallest_eigenvalue(Matrix<C>::identity(4)) == doctest::Approx(1));
    Matrix<C> A(2, 2);
    A(0, 0) = A(1, 1) = 1;
    A(0, 1) = A(1, 0) = 1 / s2;
    CHECK(smallest_eigenvalue(A) == doctest::Approx(1 - 1 / s2).epsilon(1e-12));
    Matrix<C> D(3, 3);
    D(0, 0) = 2;
    D(1, 1) = 5;
    D(2, 2) = 0.1;
    CHECK(smallest_eigenvalue(D) == doctest::Approx(0.1).epsilon(1e-12));
    Matrix<C> bad(2, 2);
    bad(0, 0) = bad(1, 1) = 1;
    bad(0, 1) = 0.5;
    bad(1, 0) = 0.2;
    CHECK_THROWS_AS(smallest_eigenvalue(bad), Error);
}

TEST_CASE("biorthogonalize examples")
{
    auto d = biorthogonalize(VectorFamily::make({{1, 0}, {0, 1}}));
    CHECK(std::abs(d.w[0][0] - C(1)) < 1e-14);
    CHECK(std::abs(d.w[1][1] - C(1)) < 1e-14);

    d = biorthogonalize(VectorFamily::make({{1, 0}, {1 / s2, 1 / s2}}));
    CHECK(d.w[0][0].real() == doctest::Approx(1));
    CHECK(d.w[0][1].real() == doctest::Approx(-1));
    CHECK(d.residual < 1e-12);
    CHECK(d.bound_ok);

    try {
        biorthogonalize(VectorFamily::make({{1, 0, 0}, {2, 0, 0}}));
        FAIL("expected DegenerateFamily");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateFamily);
    }
}

TEST_CASE("complex family matches a brute-force inverse")
{
    std::mt19937_64 rng(7);
    auto fam = random_family(rng, 4, 8);
    auto d = biorthogonalize(fam);
    auto G = gram(fam);
    std::vector<Vec> g(4, Vec(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            g[i][j] = G(i, j);
    auto Gi = brute_inverse(g);
    for (int j = 0; j < 4; ++j)
        for (int a = 0; a < 8; ++a) {
            C w = 0;
            for (int m = 0; m < 4; ++m)
                w += Gi[j][m] * fam.v[m][a];
            CHECK(std::abs(w - d.w[j][a]) < 1e-10 * (1 + std::abs(w)));
        }
}

TEST_CASE("seeded random families: delta residual and norm bound")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t r = 1 + trial % 4, dim = r + trial % 5;
        auto d = biorthogonalize(random_family(rng, r, dim));
        CHECK(d.residual <= 1e-10);
        for (double n : d.norms)
            CHECK(n <= d.bound + 1e-10);
        CHECK(d.bound_ok);
    }
}

TEST_CASE("unitary invariance")
{
    std::mt19937_64 rng(11);
    auto fam = random_family(rng, 3, 5);
    // unitary Q from Gram-Schmidt on a random complex matrix
    auto q = random_family(rng, 5, 5).v;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            C c = inner(q[i], q[j]);
            for (std::size_t a = 0; a < 5; ++a)
                q[i][a] -= c * q[j][a];
        }
        double n = std::sqrt(inner(q[i], q[i]).real());
        for (auto& x : q[i])
            x /= n;
    }
    auto rotated = fam;
    for (auto& v : rotated.v) {
        Vec u(5);
        for (std::size_t a = 0; a < 5; ++a)
            for (std::size_t b = 0; b < 5; ++b)
                u[a] += q[b][a] * v[b];
        v = u;
    }
    auto G1 = gram(fam), G2 = gram(rotated);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(G1(i, j) - G2(i, j)) < 1e-12);
    auto d1 = biorthogonalize(fam), d2 = biorthogonalize(rotated);
    CHECK(std::abs(d1.sigma - d2.sigma) < 1e-12);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(inner(fam.v[i], d1.w[j]) - inner(rotated.v[i], d2.w[j])) < 1e-12);
}
