#include "nullctl/spectral.hpp"

#include "nullctl/error.hpp"
#include "nullctl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nullctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxGenerated = std::size_t{1} << 21;

// signed offset comparison key: -1, 0, +1
int compare_offsets(const SpectralEntry& a, const SpectralEntry& b)
{
    if (a.offset_sign != b.offset_sign)
        return a.offset_sign < b.offset_sign ? -1 : 1;
    if (a.offset_sign == 0 || a.log_offset == b.log_offset)
        return 0;
    bool a_larger_mag = a.log_offset > b.log_offset;
    if (a.offset_sign > 0)
        return a_larger_mag ? 1 : -1;
    return a_larger_mag ? -1 : 1;
}

// ln|exp(la) +- exp(lb)|
double log_add(double la, double lb)
{
    double hi = std::max(la, lb), lo = std::min(la, lb);
    if (hi == -kInf)
        return -kInf;
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sub(double la, double lb)
{
    double hi = std::max(la, lb), lo = std::min(la, lb);
    if (hi == lo)
        return -kInf;
    return hi + std::log(-std::expm1(lo - hi));
}

// ln|1 - lk^2/lj^2|
double log_one_minus_sq(const SpectralEntry& ek, const SpectralEntry& ej)
{
    cplx lk = ek.value(), lj = ej.value();
    cplx z = lk / lj;
    double az = std::abs(z);
    if (az < 0.5) {
        cplx w = z * z;
        return 0.5 * std::log1p(std::norm(w) - 2 * w.real());
    }
    if (az > 2.0) {
        cplx u = 1.0 / (z * z);
        return 2 * std::log(az) + 0.5 * std::log1p(std::norm(u) - 2 * u.real());
    }
    return log_gap(ek, ej) + std::log(std::abs(lk + lj)) - 2 * std::log(std::abs(lj));
}

// ln|conj(l_l) + l_k| - ln|l_l - l_k|
double log_blaschke_term(const SpectralEntry& ek, const SpectralEntry& el)
{
    cplx lk = ek.value(), ll = el.value();
    double r = std::abs(lk) / std::abs(ll);
    if (r < 0.5) {
        cplx z1 = lk / std::conj(ll), z2 = lk / ll;
        return 0.5 * std::log1p(std::norm(z1) + 2 * z1.real()) - 0.5 * std::log1p(std::norm(z2) - 2 * z2.real());
    }
    if (r > 2.0) {
        cplx u1 = std::conj(ll) / lk, u2 = ll / lk;
        return 0.5 * std::log1p(std::norm(u1) + 2 * u1.real()) - 0.5 * std::log1p(std::norm(u2) - 2 * u2.real());
    }
    return std::log(std::abs(std::conj(ll) + lk)) - log_gap(ek, el);
}

double family_tail(const FamilyForm& f, long n, int m)
{
    double s = double(m) * f.p;
    if (s <= 1)
        return kInf;
    double base = std::pow(f.c, -double(m)) * hurwitz_zeta(s, double(n) + 1 + f.shift);
    if (f.sign == 0 || !f.log_offset)
        return base;
    detail::CompSum corr;
    for (long k = n + 1; k < n + 1000000; ++k) {
        double b = f.c * std::pow(double(k) + f.shift, f.p);
        double lo = f.log_offset(k);
        double o = f.sign * std::exp(lo);
        if (o == 0)
            break;
        double term = std::pow(b + o, -double(m)) - std::pow(b, -double(m));
        corr.add(term);
        if (std::abs(term) < 1e-20 * base)
            break;
    }
    return base + corr.value();
}

class PowerRule final : public SequenceRule {
public:
    PowerRule(double c, double p) : c_(c), p_(p)
    {
        if (!(c > 0) || !(p > 0))
            throw Error(ErrorCode::InvalidArgument, "power rule needs c > 0 and p > 0");
    }
    std::string name() const override
    {
        std::ostringstream os;
        os << "power(c=" << c_ << ",p=" << p_ << ")";
        return os.str();
    }
    std::vector<SpectralEntry> first(std::size_t count) const override
    {
        std::vector<SpectralEntry> out;
        out.reserve(count);
        for (std::size_t k = 1; k <= count; ++k) {
            auto e = SpectralEntry::plain(c_ * std::pow(double(k), p_));
            e.family_index = long(k);
            out.push_back(e);
        }
        return out;
    }
    std::vector<FamilyForm> families() const override { return {FamilyForm{c_, 0, p_, 0, {}}}; }

private:
    double c_, p_;
};

class AppendixBRule final : public SequenceRule {
public:
    explicit AppendixBRule(double tau) : tau_(tau)
    {
        if (!(tau > 0))
            throw Error(ErrorCode::InvalidArgument, "appendixB rule needs tau > 0");
    }
    std::string name() const override { return "appendixB(tau=" + std::to_string(tau_) + ")"; }
    std::vector<SpectralEntry> first(std::size_t count) const override
    {
        std::vector<SpectralEntry> out;
        out.reserve(count);
        for (long k = 1; out.size() < count; ++k) {
            double k2 = double(k) * double(k);
            auto a = SpectralEntry::plain(k2);
            a.family_index = k;
            out.push_back(a);
            if (out.size() == count)
                break;
            auto b = SpectralEntry::offset(k2, +1, -tau_ * k2);
            b.family = 1;
            b.family_index = k;
            out.push_back(b);
        }
        return out;
    }
    std::vector<FamilyForm> families() const override
    {
        double tau = tau_;
        return {FamilyForm{1, 0, 2, 0, {}},
                FamilyForm{1, 0, 2, +1, [tau](long k) { return -tau * double(k) * double(k); }}};
    }

private:
    double tau_;
};

class TwoDiffusionRule final : public SequenceRule {
public:
    TwoDiffusionRule(double d, double scale) : d_(d), scale_(scale)
    {
        if (!(d > 0) || !(scale > 0))
            throw Error(ErrorCode::InvalidArgument, "two_diffusion rule needs d > 0 and scale > 0");
    }
    std::string name() const override
    {
        std::ostringstream os;
        os << "two_diffusion(d=" << d_ << ",scale=" << scale_ << ")";
        return os.str();
    }
    std::vector<SpectralEntry> first(std::size_t count) const override
    {
        std::vector<SpectralEntry> out;
        out.reserve(count);
        long i = 1, j = 1;
        while (out.size() < count) {
            double a = scale_ * double(i * i);
            double b = scale_ * (d_ * double(j * j));
            if (a == b) {
                // rational sqrt(d): the two families share this eigenvalue
                auto e = SpectralEntry::plain(a, 2);
                e.family_index = i++;
                ++j;
                out.push_back(e);
            } else if (a < b) {
                auto e = SpectralEntry::plain(a);
                e.family_index = i++;
                out.push_back(e);
            } else {
                auto e = SpectralEntry::plain(b);
                e.family = 1;
                e.family_index = j++;
                out.push_back(e);
            }
        }
        return out;
    }
    std::vector<FamilyForm> families() const override
    {
        return {FamilyForm{scale_, 0, 2, 0, {}}, FamilyForm{scale_ * d_, 0, 2, 0, {}}};
    }

private:
    double d_, scale_;
};

class AcademicRule final : public SequenceRule {
public:
    explicit AcademicRule(double tau) : tau_(tau)
    {
        if (!(tau > 0))
            throw Error(ErrorCode::InvalidArgument, "academic_lf rule needs tau > 0");
    }
    std::string name() const override { return "academic_lf(tau=" + std::to_string(tau_) + ")"; }
    std::vector<SpectralEntry> first(std::size_t count) const override
    {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        std::vector<SpectralEntry> out;
        out.reserve(count);
        for (long k = 1; out.size() < count; ++k) {
            double lam = pi2 * double(k) * double(k);
            auto a = SpectralEntry::offset(lam, -1, -tau_ * lam);
            a.family_index = k;
            out.push_back(a);
            if (out.size() == count)
                break;
            auto b = SpectralEntry::offset(lam, +1, -tau_ * lam);
            b.family = 1;
            b.family_index = k;
            out.push_back(b);
        }
        return out;
    }
    std::vector<FamilyForm> families() const override
    {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double tau = tau_;
        auto lo = [tau, pi2](long k) { return -tau * pi2 * double(k) * double(k); };
        return {FamilyForm{pi2, 0, 2, -1, lo}, FamilyForm{pi2, 0, 2, +1, lo}};
    }

private:
    double tau_;
};

class HarmonicRule final : public SequenceRule {
public:
    std::string name() const override { return "harmonic"; }
    std::vector<SpectralEntry> first(std::size_t count) const override
    {
        std::vector<SpectralEntry> out;
        out.reserve(count);
        for (std::size_t k = 1; k <= count; ++k) {
            auto e = SpectralEntry::plain(2.0 * double(k) - 1.0);
            e.family_index = long(k);
            out.push_back(e);
        }
        return out;
    }
    std::vector<FamilyForm> families() const override { return {FamilyForm{2, -0.5, 1, 0, {}}}; }
};

bool all_real(const std::vector<SpectralEntry>& e)
{
    return std::all_of(e.begin(), e.end(), [](const SpectralEntry& x) { return x.base.imag() == 0; });
}

} // namespace

SpectralEntry SpectralEntry::plain(cplx lambda, int mult)
{
    SpectralEntry e;
    e.base = lambda;
    e.geom_mult = mult;
    return e;
}

SpectralEntry SpectralEntry::offset(double base, int sign, double log_offset)
{
    SpectralEntry e;
    e.base = base;
    e.offset_sign = sign > 0 ? 1 : (sign < 0 ? -1 : 0);
    e.log_offset = e.offset_sign ? log_offset : -kInf;
    return e;
}

cplx SpectralEntry::value() const
{
    if (offset_sign == 0)
        return base;
    return base + double(offset_sign) * std::exp(log_offset);
}

double log_gap(const SpectralEntry& a, const SpectralEntry& b)
{
    if (a.base == b.base) {
        if (a.offset_sign == 0 && b.offset_sign == 0)
            return -kInf;
        if (a.offset_sign == 0)
            return b.log_offset;
        if (b.offset_sign == 0)
            return a.log_offset;
        if (a.offset_sign == b.offset_sign)
            return log_sub(a.log_offset, b.log_offset);
        return log_add(a.log_offset, b.log_offset);
    }
    double oa = a.offset_sign ? a.offset_sign * std::exp(a.log_offset) : 0.0;
    double ob = b.offset_sign ? b.offset_sign * std::exp(b.log_offset) : 0.0;
    cplx diff = (a.base - b.base) + (oa - ob);
    double g = std::abs(diff);
    return g > 0 ? std::log(g) : -kInf;
}

bool normally_before(const SpectralEntry& a, const SpectralEntry& b)
{
    if (a.base == b.base)
        return compare_offsets(a, b) < 0;
    cplx va = a.value(), vb = b.value();
    double ma = std::abs(va), mb = std::abs(vb);
    if (ma != mb)
        return ma < mb;
    return std::arg(va) < std::arg(vb);
}

std::shared_ptr<const SequenceRule> power_rule(double c, double p) { return std::make_shared<PowerRule>(c, p); }
std::shared_ptr<const SequenceRule> appendix_b_rule(double tau) { return std::make_shared<AppendixBRule>(tau); }
std::shared_ptr<const SequenceRule> two_diffusion_rule(double d, double scale)
{
    return std::make_shared<TwoDiffusionRule>(d, scale);
}
std::shared_ptr<const SequenceRule> academic_lf_rule(double tau) { return std::make_shared<AcademicRule>(tau); }
std::shared_ptr<const SequenceRule> harmonic_rule() { return std::make_shared<HarmonicRule>(); }

void validate_entries(const std::vector<SpectralEntry>& e)
{
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!(e[i].value().real() > 0) && !(e[i].base.real() > 0))
            throw Error(ErrorCode::NonPositiveRealPart,
                        "eigenvalue at position " + std::to_string(i + 1) + " has Re <= 0");
        if (e[i].geom_mult < 1)
            throw Error(ErrorCode::InvalidArgument, "geometric multiplicity must be positive");
        if (i == 0)
            continue;
        bool plain_pair = !e[i].has_offset() && !e[i - 1].has_offset();
        if (log_gap(e[i - 1], e[i]) == -kInf ||
            (plain_pair && std::abs(e[i].value() - e[i - 1].value()) < 1e-300))
            throw Error(ErrorCode::DuplicateEntry, "entries " + std::to_string(i) + " and " +
                                                       std::to_string(i + 1) + " coincide");
        if (!normally_before(e[i - 1], e[i]))
            throw Error(ErrorCode::InvalidArgument,
                        "entries are not normally ordered at position " + std::to_string(i + 1));
    }
}

SpectralSequence normal_order(std::vector<SpectralEntry> raw, Extent extent)
{
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (!(raw[i].base.real() > 0))
            throw Error(ErrorCode::NonPositiveRealPart,
                        "input eigenvalue " + std::to_string(i + 1) + " has Re <= 0");
    std::stable_sort(raw.begin(), raw.end(), normally_before);
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (!normally_before(raw[i - 1], raw[i]))
            throw Error(ErrorCode::DuplicateEntry, "two input eigenvalues coincide");
    if (extent == Extent::Prefix)
        return SpectralSequence::prefix(std::move(raw));
    return SpectralSequence::finite(std::move(raw));
}

SpectralSequence normal_order(const std::vector<RawEigenvalue>& raw)
{
    std::vector<SpectralEntry> e;
    e.reserve(raw.size());
    for (const auto& r : raw)
        e.push_back(SpectralEntry::plain(r.lambda, r.mult));
    return normal_order(std::move(e));
}

SpectralSequence SpectralSequence::finite(std::vector<SpectralEntry> entries)
{
    validate_entries(entries);
    SpectralSequence s;
    s.extent_ = Extent::Finite;
    s.cache_ = std::make_shared<Cache>();
    s.cache_->data = std::make_shared<const std::vector<SpectralEntry>>(std::move(entries));
    return s;
}

SpectralSequence SpectralSequence::prefix(std::vector<SpectralEntry> entries)
{
    validate_entries(entries);
    SpectralSequence s;
    s.extent_ = Extent::Prefix;
    const std::size_t n = entries.size();
    if (n >= 4) {
        std::vector<double> x, y;
        for (std::size_t j = n / 2; j < n; ++j) {
            x.push_back(std::log(double(j + 1)));
            y.push_back(std::log(std::abs(entries[j].value())));
        }
        s.fit_p_ = ls_slope(x, y);
        double c = kInf;
        for (std::size_t j = n / 2; j < n; ++j)
            c = std::min(c, std::abs(entries[j].value()) / std::pow(double(j + 1), s.fit_p_));
        s.fit_c_ = c;
    }
    s.cache_ = std::make_shared<Cache>();
    s.cache_->data = std::make_shared<const std::vector<SpectralEntry>>(std::move(entries));
    return s;
}

SpectralSequence SpectralSequence::generated(std::shared_ptr<const SequenceRule> rule)
{
    if (!rule)
        throw Error(ErrorCode::InvalidArgument, "null sequence rule");
    SpectralSequence s;
    s.extent_ = Extent::Generated;
    s.rule_ = std::move(rule);
    s.cache_ = std::make_shared<Cache>();
    auto init = s.rule_->first(64);
    validate_entries(init);
    s.cache_->data = std::make_shared<const std::vector<SpectralEntry>>(std::move(init));
    return s;
}

std::string SpectralSequence::describe() const
{
    switch (extent_) {
    case Extent::Generated: return rule_->name();
    case Extent::Prefix: return "prefix(" + std::to_string(available()) + ")";
    case Extent::Finite: return "finite(" + std::to_string(available()) + ")";
    }
    return "";
}

std::size_t SpectralSequence::available() const
{
    if (extent_ == Extent::Generated)
        return std::numeric_limits<std::size_t>::max();
    return cache_ ? cache_->data->size() : 0;
}

std::shared_ptr<const std::vector<SpectralEntry>> SpectralSequence::entries(std::size_t count) const
{
    if (!cache_)
        return std::make_shared<const std::vector<SpectralEntry>>();
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (extent_ != Extent::Generated || cache_->data->size() >= count)
        return cache_->data;
    if (count > kMaxGenerated)
        throw Error(ErrorCode::TailBoundUnachievable,
                    "sequence generation beyond " + std::to_string(kMaxGenerated) + " entries requested");
    std::size_t target = std::min(kMaxGenerated, std::max(count, 2 * cache_->data->size()));
    auto fresh = rule_->first(target);
    validate_entries(fresh);
    cache_->data = std::make_shared<const std::vector<SpectralEntry>>(std::move(fresh));
    return cache_->data;
}

SpectralEntry SpectralSequence::at(std::size_t index0) const
{
    auto snap = entries(index0 + 1);
    if (index0 >= snap->size())
        throw Error(ErrorCode::InvalidArgument, "sequence index out of range");
    return (*snap)[index0];
}

double SpectralSequence::tail_sum(std::size_t J, int m) const
{
    auto snap = entries(extent_ == Extent::Generated ? J : 0);
    const auto& e = *snap;
    auto pw = [m](const SpectralEntry& x) { return std::pow(std::abs(x.value()), -double(m)); };
    switch (extent_) {
    case Extent::Finite: {
        detail::CompSum s;
        for (std::size_t j = J; j < e.size(); ++j)
            s.add(pw(e[j]));
        return s.value();
    }
    case Extent::Prefix: {
        if (!(fit_p_ * m > 1) || !(fit_c_ > 0))
            return kInf;
        detail::CompSum s;
        for (std::size_t j = J; j < e.size(); ++j)
            s.add(pw(e[j]));
        double from = double(std::max(J, e.size()));
        s.add(std::pow(fit_c_, -double(m)) * std::pow(from, 1 - m * fit_p_) / (m * fit_p_ - 1));
        return s.value();
    }
    case Extent::Generated: {
        auto fams = rule_->families();
        if (fams.empty())
            return kInf;
        std::vector<long> count(fams.size(), 0);
        for (std::size_t j = 0; j < J && j < e.size(); ++j) {
            auto f = std::size_t(e[j].family);
            if (f < count.size())
                count[f] = std::max(count[f], e[j].family_index);
        }
        double s = 0;
        for (std::size_t f = 0; f < fams.size(); ++f)
            s += family_tail(fams[f], count[f], m);
        return s;
    }
    }
    return kInf;
}

HypothesisReport check_hypotheses(const SpectralSequence& seq, std::size_t K, double fit_tol)
{
    std::size_t need = std::max<std::size_t>(K, 16);
    if (seq.available() < need || K < 2)
        throw Error(ErrorCode::TooFewModes, "check_hypotheses needs at least max(K,16) = " +
                                                std::to_string(need) + " entries");
    auto e = seq.entries(need);
    HypothesisReport r;
    r.sector_delta_est = kInf;
    for (std::size_t i = 0; i < K; ++i) {
        cplx v = (*e)[i].value();
        r.sector_delta_est = std::min(r.sector_delta_est, v.real() / std::abs(v));
        r.sup_rk = std::max(r.sup_rk, (*e)[i].geom_mult);
    }
    std::vector<double> x, y;
    for (std::size_t k = std::max<std::size_t>(1, K / 2); k <= K; ++k) {
        x.push_back(std::log(double(k)));
        y.push_back(std::log(std::abs((*e)[k - 1].value())));
    }
    r.summability_exponent = ls_slope(x, y);
    r.summable = r.summability_exponent > 1 + fit_tol;
    if (!r.summable)
        r.warnings.push_back("HYP_SUMMABILITY_FAIL");
    if (seq.sector_delta && r.sector_delta_est < *seq.sector_delta)
        r.warnings.push_back("HYP_SECTOR_BELOW_DECLARED");
    return r;
}

namespace {

struct TailPlan {
    std::shared_ptr<const std::vector<SpectralEntry>> snap;
    std::size_t J = 0;
    double first_order = 0; ///< analytic first-order tail contribution
};

// Chooses J for a sum over j != k whose j-th term is bounded via
// tail sums. `first(J)` returns the analytic first-order contribution (or
// 0), `bound(J, rho)` the remainder bound.
template <class First, class Bound>
TailPlan plan_truncation(const SpectralSequence& seq, std::size_t k, double tol, First first, Bound bound)
{
    TailPlan p;
    if (seq.extent() == Extent::Finite) {
        p.snap = seq.entries(0);
        p.J = p.snap->size();
        return p;
    }
    const bool prefix = seq.extent() == Extent::Prefix;
    const std::size_t n = seq.available();
    std::size_t J = std::max<std::size_t>(2 * k, 64);
    if (prefix)
        J = std::min(J, n);
    for (;;) {
        auto snap = seq.entries(J + 1);
        double lk = std::abs((*snap)[k - 1].value());
        double next;
        if (J < snap->size())
            next = std::abs((*snap)[J].value());
        else
            next = lk * 2; // prefix end: the fitted tail governs
        double rho = lk / next;
        double b = rho < 1 ? bound(J, rho, lk) : kInf;
        if (b < tol) {
            p.snap = snap;
            p.J = J;
            p.first_order = first(J, lk);
            return p;
        }
        if (prefix && J >= n)
            break;
        if (J >= kMaxGenerated / 2)
            break;
        J = prefix ? std::min(2 * J, n) : 2 * J;
    }
    throw Error(ErrorCode::TailBoundUnachievable,
                "tail bound " + std::to_string(tol) + " not reachable for k=" + std::to_string(k) + " on " +
                    seq.describe());
}

bool real_tail(const SpectralSequence& seq)
{
    if (seq.extent() == Extent::Generated)
        return true; // all built-in rules are real
    return all_real(*seq.entries(0));
}

} // namespace

double log_E_prime(const SpectralSequence& seq, std::size_t k, double rel_tail_tol)
{
    if (k < 1 || k > seq.available())
        throw Error(ErrorCode::InvalidArgument, "log_E_prime: index out of range");
    const bool real = real_tail(seq);
    // real tails: ln(1 - w) = -(w + w^2/2 + w^3/3) - ..., w = lk^2/lj^2
    auto first = [&](std::size_t J, double lk) {
        if (!real)
            return 0.0;
        double s = 0;
        for (int m = 1; m <= 3; ++m)
            s -= std::pow(lk, 2 * m) * seq.tail_sum(J, 2 * m) / m;
        return s;
    };
    auto bound = [&](std::size_t J, double rho, double lk) {
        if (real)
            return std::pow(lk, 8) * seq.tail_sum(J, 8) / (4 * (1 - rho * rho));
        return lk * lk * seq.tail_sum(J, 2) / (1 - rho * rho);
    };
    TailPlan p = plan_truncation(seq, k, rel_tail_tol, first, bound);
    const auto& e = *p.snap;
    const SpectralEntry& ek = e[k - 1];
    detail::CompSum s;
    s.add(std::log(2.0 / std::abs(ek.value())));
    for (std::size_t j = 0; j < p.J; ++j)
        if (j != k - 1)
            s.add(log_one_minus_sq(ek, e[j]));
    s.add(p.first_order);
    return s.value();
}

double blaschke_log_wprime(const SpectralSequence& seq, std::size_t k, double rel_tail_tol)
{
    if (k < 1 || k > seq.available())
        throw Error(ErrorCode::InvalidArgument, "blaschke_log_wprime: index out of range");
    const bool real = real_tail(seq);
    // real tails: ln((1 + z)/(1 - z)) = 2(z + z^3/3 + z^5/5) + ..., z = lk/ll
    auto first = [&](std::size_t J, double lk) {
        if (!real)
            return 0.0;
        double s = 0;
        for (int m = 1; m <= 5; m += 2)
            s += 2 * std::pow(lk, m) * seq.tail_sum(J, m) / m;
        return s;
    };
    auto bound = [&](std::size_t J, double rho, double lk) {
        if (real)
            return 2.0 / 7.0 * std::pow(lk, 7) * seq.tail_sum(J, 7) / (1 - rho * rho);
        return 2 * lk * seq.tail_sum(J, 1) / (1 - rho);
    };
    TailPlan p = plan_truncation(seq, k, rel_tail_tol, first, bound);
    const auto& e = *p.snap;
    const SpectralEntry& ek = e[k - 1];
    detail::CompSum lnP;
    for (std::size_t j = 0; j < p.J; ++j)
        if (j != k - 1)
            lnP.add(log_blaschke_term(ek, e[j]));
    lnP.add(p.first_order);
    return -std::log(2 * ek.value().real()) - lnP.value();
}

ProfileReport condensation_profile(const SpectralSequence& seq, std::size_t K, double rel_tail_tol, int window)
{
    if (K > seq.available())
        throw Error(ErrorCode::TooFewModes, "condensation_profile: K exceeds sequence length");
    std::vector<long> ks;
    std::vector<double> v, re;
    auto e = seq.entries(K);
    for (std::size_t k = 1; k <= K; ++k) {
        double rl = (*e)[k - 1].value().real();
        ks.push_back(long(k));
        v.push_back(-log_E_prime(seq, k, rel_tail_tol) / rl);
        re.push_back(rl);
    }
    auto p = make_profile(std::move(ks), std::move(v), window);
    p.re_lambda = std::move(re);
    return p;
}

ProfileReport blaschke_profile(const SpectralSequence& seq, std::size_t K, double rel_tail_tol, int window)
{
    if (K > seq.available())
        throw Error(ErrorCode::TooFewModes, "blaschke_profile: K exceeds sequence length");
    std::vector<long> ks;
    std::vector<double> v, re;
    auto e = seq.entries(K);
    for (std::size_t k = 1; k <= K; ++k) {
        double rl = (*e)[k - 1].value().real();
        ks.push_back(long(k));
        v.push_back(-blaschke_log_wprime(seq, k, rel_tail_tol) / rl);
        re.push_back(rl);
    }
    auto p = make_profile(std::move(ks), std::move(v), window);
    p.re_lambda = std::move(re);
    return p;
}

ProfileReport bohr_profile(const SpectralSequence& seq, std::size_t K, int window)
{
    if (K < 2 || K > seq.available())
        throw Error(ErrorCode::TooFewModes, "bohr_profile needs 2 <= K <= length");
    std::size_t have = std::min(seq.available(), 2 * K + 16);
    auto snap = seq.entries(have);
    std::vector<long> ks, partner;
    std::vector<double> v, re;
    for (std::size_t k = 1; k <= K; ++k) {
        const SpectralEntry ek = (*snap)[k - 1];
        double mk = std::abs(ek.value());
        double best = kInf;
        long arg = 0;
        for (std::size_t j = k - 1; j-- > 0;) {
            double dm = mk - std::abs((*snap)[j].value());
            if (dm > 0 && std::log(dm) > best)
                break;
            double g = log_gap(ek, (*snap)[j]);
            if (g < best) {
                best = g;
                arg = long(j + 1);
            }
        }
        for (std::size_t j = k;; ++j) {
            if (j >= snap->size()) {
                if (seq.extent() != Extent::Generated)
                    break;
                snap = seq.entries(2 * snap->size());
            }
            double dm = std::abs((*snap)[j].value()) - mk;
            if (dm > 0 && std::log(dm) > best)
                break;
            double g = log_gap(ek, (*snap)[j]);
            if (g < best) {
                best = g;
                arg = long(j + 1);
            }
        }
        double rl = ek.value().real();
        ks.push_back(long(k));
        v.push_back(-best / rl);
        re.push_back(rl);
        partner.push_back(arg);
    }
    auto p = make_profile(std::move(ks), std::move(v), window);
    p.re_lambda = std::move(re);
    p.partner = std::move(partner);
    return p;
}

double hurwitz_zeta(double s, double a)
{
    if (!(s > 1) || !(a > 0))
        throw Error(ErrorCode::InvalidArgument, "hurwitz_zeta needs s > 1, a > 0");
    constexpr int N = 16;
    detail::CompSum sum;
    for (int n = 0; n < N; ++n)
        sum.add(std::pow(a + n, -s));
    double x = a + N;
    sum.add(std::pow(x, 1 - s) / (s - 1));
    sum.add(0.5 * std::pow(x, -s));
    // Euler-Maclaurin corrections B_2j/(2j)! s(s+1)...(s+2j-2) x^(-s-2j+1)
    static const double b2j[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
    double poch = s;       // s(s+1)...(s+2j-2)
    double fact = 2;       // (2j)!
    double xp = std::pow(x, -s - 1);
    for (int j = 1; j <= 7; ++j) {
        sum.add(b2j[j - 1] / fact * poch * xp);
        poch *= (s + 2 * j - 1) * (s + 2 * j);
        fact *= double(2 * j + 1) * double(2 * j + 2);
        xp /= x * x;
    }
    return sum.value();
}

double log_sinh(double x)
{
    if (x > 20)
        return x - std::log(2.0) + std::log1p(-std::exp(-2 * x));
    return std::log(std::sinh(x));
}

} // namespace nullctl
