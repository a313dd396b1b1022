#include "nullctl/profile.hpp"

#include "nullctl/error.hpp"

#include <algorithm>
#include <cmath>

namespace nullctl {

ProfileReport make_profile(std::vector<long> k, std::vector<double> value, int window, double cap)
{
    if (k.size() != value.size())
        throw Error(ErrorCode::InvalidArgument, "make_profile: index/value length mismatch");
    if (window < 1)
        throw Error(ErrorCode::InvalidArgument, "make_profile: window must be positive");
    ProfileReport p;
    p.k = std::move(k);
    p.value = std::move(value);
    p.window = window;
    p.running_sup.resize(p.value.size());
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
        if (!std::isnan(p.value[i]))
            sup = std::max(sup, p.value[i]);
        p.running_sup[i] = sup;
    }
    const std::size_t n = p.value.size();
    const std::size_t from = n > std::size_t(window) ? n - std::size_t(window) : 0;
    double tail = -std::numeric_limits<double>::infinity();
    for (std::size_t i = from; i < n; ++i)
        if (!std::isnan(p.value[i]))
            tail = std::max(tail, p.value[i]);
    p.tail_estimate = tail;
    p.unbounded = n > 0 && sup > cap;
    if (p.unbounded)
        p.notes.push_back("UNBOUNDED");
    return p;
}

double window_sup(const ProfileReport& p, long k_lo, long k_hi)
{
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.k.size(); ++i)
        if (p.k[i] >= k_lo && p.k[i] <= k_hi && !std::isnan(p.value[i]))
            s = std::max(s, p.value[i]);
    return s;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return sxy / sxx;
}

} // namespace nullctl
