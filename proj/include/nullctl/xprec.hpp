#pragma once

// Extended-precision scalars used by the Gram solves and the closed-form
// pairings of biorthogonal families.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>

namespace nullctl {

/// 128 significant decimal digits, expression templates off.
using xreal = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<128>,
                                            boost::multiprecision::et_off>;

/// Minimal complex type over an arbitrary real scalar. std::complex is only
/// specified for the built-in floating point types.
template <class R>
struct Cx {
    R re{0};
    R im{0};

    Cx() = default;
    Cx(R r) : re(std::move(r)) {}
    Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

    Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
    Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
    Cx& operator*=(const Cx& o)
    {
        R r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Cx& operator/=(const Cx& o) { return *this = *this / o; }

    friend Cx operator+(Cx a, const Cx& b) { return a += b; }
    friend Cx operator-(Cx a, const Cx& b) { return a -= b; }
    friend Cx operator*(Cx a, const Cx& b) { return a *= b; }
    friend Cx operator-(const Cx& a) { return {-a.re, -a.im}; }
    friend Cx operator/(const Cx& a, const Cx& b)
    {
        // Smith's algorithm keeps intermediate magnitudes bounded.
        using std::abs;
        if (abs(b.re) >= abs(b.im)) {
            R r = b.im / b.re;
            R d = b.re + b.im * r;
            return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
        }
        R r = b.re / b.im;
        R d = b.re * r + b.im;
        return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
    }
};

template <class R>
Cx<R> conj(const Cx<R>& z) { return {z.re, -z.im}; }

template <class R>
R norm2(const Cx<R>& z) { return z.re * z.re + z.im * z.im; }

template <class R>
R abs(const Cx<R>& z)
{
    using std::sqrt;
    return sqrt(norm2(z));
}

template <class R>
Cx<R> exp(const Cx<R>& z)
{
    using std::cos;
    using std::exp;
    using std::sin;
    R m = exp(z.re);
    if (z.im == 0)
        return {m, R(0)};
    return {m * cos(z.im), m * sin(z.im)};
}

template <class R>
bool is_zero(const Cx<R>& z) { return z.re == 0 && z.im == 0; }

using xcomplex = Cx<xreal>;

inline xcomplex to_x(std::complex<double> z) { return {xreal(z.real()), xreal(z.imag())}; }

template <class R>
std::complex<double> to_std(const Cx<R>& z)
{
    return {static_cast<double>(z.re), static_cast<double>(z.im)};
}

inline Cx<double> to_cx(std::complex<double> z) { return {z.real(), z.imag()}; }

} // namespace nullctl
