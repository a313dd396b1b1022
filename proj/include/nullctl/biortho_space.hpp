#pragma once

// Duals of finitely many vectors through their Gram matrix: w^t = G^{-1} v^t,
// with ||w_i|| <= sqrt(r)/sigma where sigma^2 is the smallest eigenvalue of G.

#include "nullctl/linalg.hpp"

#include <complex>
#include <vector>

namespace nullctl {

/// Vectors given by coordinates in an orthonormal reference basis.
struct VectorFamily {
    std::size_t dim = 0;
    std::vector<std::vector<std::complex<double>>> v;

    std::size_t r() const { return v.size(); }
    /// Checks coordinate lengths; throws InvalidArgument.
    static VectorFamily make(std::vector<std::vector<std::complex<double>>> vectors);
};

/// <a, b> = sum a_i conj(b_i).
std::complex<double> inner(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b);

/// G_ij = <v_i, v_j>.
Matrix<std::complex<double>> gram(const VectorFamily& fam);

/// sigma^2. Throws NotHermitian.
double smallest_eigenvalue(const Matrix<std::complex<double>>& G);

inline constexpr double degeneracy_tol = 1e-12;

struct SpatialDual {
    std::vector<std::vector<std::complex<double>>> w;
    Matrix<std::complex<double>> combination; ///< w_j = sum_m combination(j, m) v_m
    double sigma = 0;
    double bound = 0; ///< sqrt(r)/sigma
    std::vector<double> norms;
    double residual = 0; ///< max |<v_i, w_j> - delta_ij|
    bool bound_ok = false;
};

/// Throws DegenerateFamily when sigma^2 <= degeneracy_tol.
SpatialDual biorthogonalize(const VectorFamily& fam);

} // namespace nullctl
