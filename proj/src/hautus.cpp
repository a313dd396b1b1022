#include "nullctl/hautus.hpp"

#include "nullctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nullctl {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double clamp0(double v) { return std::isnan(v) ? v : std::max(0.0, v); }

ProfileReport finish(std::vector<long> ks, std::vector<double> v, std::vector<double> re, int window,
                     std::vector<std::string> notes = {})
{
    auto p = make_profile(std::move(ks), std::move(v), window);
    p.re_lambda = std::move(re);
    for (auto& n : notes)
        p.notes.push_back(std::move(n));
    return p;
}

} // namespace

double inequality_ratio(const TestVector& tv, double T, double C)
{
    const double re = tv.lambda.real();
    if (!(re > 0) || !(T >= 0) || !(C > 0) || !(tv.norm_y > 0) || tv.norm_Ay < 0 || tv.norm_By < 0)
        throw Error(ErrorCode::InvalidArgument, "inequality_ratio: needs Re lambda > 0, T >= 0, C > 0, |y| > 0");
    const double rhs = tv.norm_Ay * tv.norm_Ay / (re * re) + tv.norm_By * tv.norm_By / re;
    // e^{2 T re} overflows long before the ratio stops being meaningful
    const double log_ratio = std::log(C) + 2 * T * re + std::log(rhs) - 2 * std::log(tv.norm_y);
    return std::exp(log_ratio);
}

TestVector grushin_test_vector(const CrossSectionMode& mode, double a, double b)
{
    TestVector tv;
    tv.lambda = mode.lambda;
    tv.norm_y = 1;
    tv.norm_Ay = 0;
    tv.norm_By = std::exp(0.5 * (std::log(2.0) + log_observation_integral(mode, a, b)));
    return tv;
}

ProfileReport tstar_observation_profile(const ParabolicModel& model, std::size_t K, int window)
{
    auto modes = model.modes(K);
    std::vector<long> ks;
    std::vector<double> v, re;
    std::vector<std::string> notes;
    for (const auto& m : modes) {
        if (m.obs.empty() || m.obs[0].kind() == ObservationVector::Kind::Unavailable)
            throw Error(ErrorCode::ObservationUnavailable,
                        model.name() + ": observation of mode " + std::to_string(m.k) + " is not available");
        const double r = m.lambda.value().real();
        const double o = m.obs[0].norm();
        ks.push_back(m.k);
        re.push_back(r);
        if (o == 0) {
            v.push_back(inf);
            notes.push_back("mode " + std::to_string(m.k) + " unobservable");
            continue;
        }
        if (o < vanishing_observation)
            notes.push_back("mode " + std::to_string(m.k) + " nearly unobservable");
        v.push_back(clamp0((-std::log(o) + 0.5 * std::log(r)) / r));
    }
    return finish(ks, v, re, window, notes);
}

ProfileReport tstar_gap_profile(const ParabolicModel& model, std::size_t K, int window)
{
    if (!model.pair_kernel)
        throw Error(ErrorCode::StructuralHypothesisMissing,
                    model.name() + ": no rule placing a pair combination in Ker B*; the gap profile does not apply");
    auto e = model.spectrum().entries(K + 1);
    const std::size_t n = std::min(K, e->size());
    const std::size_t scan = std::min(K + 1, e->size());
    std::vector<long> ks;
    std::vector<double> v, re;
    for (std::size_t k = 0; k < n; ++k) {
        double lg = inf;
        for (std::size_t j = 0; j < scan; ++j)
            if (j != k)
                lg = std::min(lg, log_gap((*e)[k], (*e)[j]));
        const double r = (*e)[k].value().real();
        ks.push_back(long(k + 1));
        re.push_back(r);
        v.push_back(clamp0((-lg + std::log(r)) / r));
    }
    return finish(ks, v, re, window);
}

JordanProfiles tstar_jordan_profile(const ParabolicModel& model, std::size_t K, int window)
{
    auto modes = model.modes(K);
    std::vector<long> k1, k2;
    std::vector<double> v1, v2, r1, r2;
    std::vector<std::string> notes;
    bool any = false;
    for (const auto& m : modes) {
        if (m.kind != ModeKind::Jordan2)
            continue;
        any = true;
        if (std::abs(m.mu) == 0) {
            notes.push_back("mode " + std::to_string(m.k) + " has mu = 0; skipped");
            continue;
        }
        const double r = m.lambda.value().real();
        const double lmu = std::log(std::abs(m.mu));
        k1.push_back(m.k);
        r1.push_back(r);
        v1.push_back(clamp0((-lmu + std::log(r)) / r));
        if (m.gamma) {
            const double g = std::abs(*m.gamma);
            k2.push_back(m.k);
            r2.push_back(r);
            v2.push_back(g == 0 ? 0.0 : clamp0((std::log(g) - lmu + std::log(r)) / r));
        }
    }
    if (!any)
        throw Error(ErrorCode::NoJordanModes, model.name() + ": no Jordan chains among the first " +
                                                  std::to_string(K) + " modes");
    JordanProfiles out;
    out.mu = finish(k1, v1, r1, window, notes);
    if (!k2.empty())
        out.gamma = finish(k2, v2, r2, window);
    return out;
}

TstarEstimate tstar_estimate(const ParabolicModel& model, std::size_t K, int window)
{
    TstarEstimate est;
    auto add = [&](const std::string& name, const ProfileReport& p) {
        if (p.size() == 0)
            return;
        est.components[name] = p.tail_estimate;
    };
    try {
        add("observation", tstar_observation_profile(model, K, window));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ObservationUnavailable)
            throw;
        est.notes.push_back("observation profile unavailable");
    }
    if (model.pair_kernel)
        add("gap", tstar_gap_profile(model, K, window));
    try {
        auto j = tstar_jordan_profile(model, K, window);
        add("jordan_mu", j.mu);
        add("jordan_gamma", j.gamma);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoJordanModes)
            throw;
    }
    if (est.components.empty())
        throw Error(ErrorCode::NoProfileAvailable, model.name() + ": no T* profile applies");
    est.lower = 0;
    for (const auto& [name, v] : est.components)
        est.lower = std::max(est.lower, v);
    if (std::isinf(est.lower))
        est.notes.push_back("an eigenvector is unobservable: the Hautus test fails for every T");
    if (!model.pair_kernel && est.components.count("jordan_mu") == 0)
        est.notes.push_back("lower bound only; condensation effects are not captured without a pair rule");
    return est;
}

} // namespace nullctl
