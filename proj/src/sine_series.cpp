#include "nullctl/error.hpp"
#include "nullctl/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nullctl {

namespace {

constexpr double pi = std::numbers::pi;

// int_a^b cos(j pi x) dx
double cos_integral(long j, double a, double b)
{
    if (j == 0)
        return b - a;
    const double w = double(j) * pi;
    // sin(wb) - sin(wa) = 2 cos(w(a+b)/2) sin(w(b-a)/2), no cancellation for short intervals
    return 2 * std::cos(w * (a + b) / 2) * std::sin(w * (b - a) / 2) / w;
}

} // namespace

double sine_product_integral(long m, long n, double a, double b)
{
    return cos_integral(std::labs(m - n), a, b) - cos_integral(m + n, a, b);
}

PiecewiseConstant PiecewiseConstant::make(std::vector<double> breaks, std::vector<double> values)
{
    if (breaks.size() != values.size() + 1 || values.empty())
        throw Error(ErrorCode::InvalidArgument, "piecewise constant: need one more breakpoint than values");
    if (breaks.front() != 0 || breaks.back() != 1)
        throw Error(ErrorCode::InvalidArgument, "piecewise constant: breakpoints must start at 0 and end at 1");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (!(breaks[i] > breaks[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "piecewise constant: breakpoints must increase");
    for (double v : values)
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "piecewise constant: non-finite value");
    return {std::move(breaks), std::move(values)};
}

PiecewiseConstant PiecewiseConstant::indicator(double a, double b, double value)
{
    if (!(0 <= a && a < b && b <= 1))
        throw Error(ErrorCode::InvalidArgument, "indicator interval must satisfy 0 <= a < b <= 1");
    std::vector<double> br{0}, val;
    if (a > 0) {
        br.push_back(a);
        val.push_back(0);
    }
    br.push_back(b);
    val.push_back(value);
    if (b < 1) {
        br.push_back(1);
        val.push_back(0);
    }
    return make(br, val);
}

bool PiecewiseConstant::identically_zero() const
{
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0; });
}

double PiecewiseConstant::support_overlap(double a, double b) const
{
    double len = 0;
    for (std::size_t p = 0; p < values.size(); ++p) {
        if (values[p] == 0)
            continue;
        double lo = std::max(a, breaks[p]), hi = std::min(b, breaks[p + 1]);
        if (hi > lo)
            len += hi - lo;
    }
    return len;
}

double PiecewiseConstant::weighted_product(long m, long n, double lo, double hi) const
{
    double s = 0;
    for (std::size_t p = 0; p < values.size(); ++p) {
        if (values[p] == 0)
            continue;
        double a = std::max(lo, breaks[p]), b = std::min(hi, breaks[p + 1]);
        if (b > a)
            s += values[p] * sine_product_integral(m, n, a, b);
    }
    return s;
}

double PiecewiseConstant::operator()(double x) const
{
    for (std::size_t p = 0; p < values.size(); ++p)
        if (x < breaks[p + 1])
            return values[p];
    return values.back();
}

ObservationVector ObservationVector::scalar(cplx value)
{
    ObservationVector o;
    o.kind_ = Kind::Scalar;
    o.value_ = value;
    return o;
}

ObservationVector ObservationVector::sine_series(std::vector<cplx> coeffs, double a, double b)
{
    if (!(0 <= a && a < b && b <= 1))
        throw Error(ErrorCode::InvalidArgument, "observation interval must satisfy 0 <= a < b <= 1");
    ObservationVector o;
    o.kind_ = Kind::SineSeries;
    o.coeffs_ = std::move(coeffs);
    o.a_ = a;
    o.b_ = b;
    return o;
}

ObservationVector ObservationVector::unavailable()
{
    ObservationVector o;
    o.kind_ = Kind::Unavailable;
    return o;
}

cplx ObservationVector::inner_product(const ObservationVector& o) const
{
    if (kind_ == Kind::Unavailable || o.kind_ == Kind::Unavailable)
        throw Error(ErrorCode::ObservationUnavailable, "observation is not available for this model");
    if (kind_ != o.kind_)
        throw Error(ErrorCode::InvalidArgument, "inner product between scalar and sine-series observations");
    if (kind_ == Kind::Scalar)
        return value_ * std::conj(o.value_);
    if (a_ != o.a_ || b_ != o.b_)
        throw Error(ErrorCode::InvalidArgument, "sine-series observations live on different intervals");

    const std::size_t M = coeffs_.size(), N = o.coeffs_.size();
    std::vector<double> I(M + N + 1);
    for (std::size_t j = 0; j < I.size(); ++j)
        I[j] = cos_integral(long(j), a_, b_);
    cplx s = 0;
    for (std::size_t m = 0; m < M; ++m) {
        if (coeffs_[m] == cplx(0))
            continue;
        cplx row = 0;
        for (std::size_t n = 0; n < N; ++n) {
            if (o.coeffs_[n] == cplx(0))
                continue;
            std::size_t diff = m > n ? m - n : n - m;
            row += std::conj(o.coeffs_[n]) * (I[diff] - I[m + n + 2]);
        }
        s += coeffs_[m] * row;
    }
    return s;
}

double ObservationVector::norm() const { return std::sqrt(std::max(0.0, inner_product(*this).real())); }

bool ObservationVector::is_zero() const
{
    if (kind_ == Kind::Unavailable)
        return false;
    return norm() < vanishing_observation;
}

ObservationVector ObservationVector::operator*(cplx s) const
{
    ObservationVector o = *this;
    o.value_ *= s;
    for (auto& c : o.coeffs_)
        c *= s;
    return o;
}

ObservationVector ObservationVector::operator+(const ObservationVector& o) const
{
    if (kind_ == Kind::Unavailable || o.kind_ == Kind::Unavailable)
        throw Error(ErrorCode::ObservationUnavailable, "observation is not available for this model");
    if (kind_ != o.kind_)
        throw Error(ErrorCode::InvalidArgument, "sum of scalar and sine-series observations");
    ObservationVector r = *this;
    if (kind_ == Kind::Scalar) {
        r.value_ += o.value_;
        return r;
    }
    if (a_ != o.a_ || b_ != o.b_)
        throw Error(ErrorCode::InvalidArgument, "sine-series observations live on different intervals");
    if (r.coeffs_.size() < o.coeffs_.size())
        r.coeffs_.resize(o.coeffs_.size());
    for (std::size_t m = 0; m < o.coeffs_.size(); ++m)
        r.coeffs_[m] += o.coeffs_[m];
    return r;
}

cplx ObservationVector::evaluate(double x) const
{
    switch (kind_) {
    case Kind::Scalar:
        return value_;
    case Kind::Unavailable:
        throw Error(ErrorCode::ObservationUnavailable, "observation is not available for this model");
    case Kind::SineSeries:
        break;
    }
    if (x < a_ || x > b_)
        return 0;
    cplx s = 0;
    for (std::size_t m = 0; m < coeffs_.size(); ++m)
        if (coeffs_[m] != cplx(0))
            s += coeffs_[m] * (std::sqrt(2.0) * std::sin(double(m + 1) * pi * x));
    return s;
}

} // namespace nullctl
