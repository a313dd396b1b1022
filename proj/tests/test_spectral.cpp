#include "doctest.h"

#include "nullctl/error.hpp"
#include "nullctl/spectral.hpp"

#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace nullctl;

namespace {

constexpr double pi = std::numbers::pi;

SpectralSequence squares_pi2(std::size_t n)
{
    std::vector<SpectralEntry> e;
    for (std::size_t k = 1; k <= n; ++k)
        e.push_back(SpectralEntry::plain(double(k * k) * pi * pi));
    return SpectralSequence::prefix(e);
}

// |E'(k^2 s)| for Lambda = {j^2 s, d j^2 s}, from E(z) = S(z/s) S(z/(d s)) with
// S(w) = sin(pi sqrt w)/(pi sqrt w) * sinh(pi sqrt w)/(pi sqrt w) when s = 1,
// and sin(sqrt w)/sqrt w * sinh(sqrt w)/sqrt w when s = pi^2 (w in units of pi^2).
double log_eprime_two_family(long k, double d, bool pi_scaled)
{
    // derivative of the vanishing factor sin(x)/x at x = k pi with x = sqrt(z/s)
    // d/dz = cos(k pi)/(2 z); z = k^2 s
    double s = pi_scaled ? pi * pi : 1.0;
    double z = double(k * k) * s;
    double x = double(k) * pi;           // sqrt(z/s) * (pi or 1) in radians
    double lf1 = -std::log(2 * z);       // |cos(k pi)| / (2 z)
    double lf2 = log_sinh(x) - std::log(x); // sinh/x at the same point
    double y = x / std::sqrt(d);
    double lf3 = std::log(std::abs(std::sin(y))) - std::log(y);
    double lf4 = log_sinh(y) - std::log(y);
    // in the unscaled case sin(pi sqrt w)/(pi sqrt w): the z-derivative picks
    // up no extra pi since x already carries it
    return lf1 + lf2 + lf3 + lf4;
}

} // namespace

TEST_CASE("normal_order sorts by modulus then argument")
{
    auto s = normal_order(std::vector<RawEigenvalue>{{4.0}, {1.0}, {9.0}});
    auto e = s.entries(3);
    CHECK((*e)[0].value() == cplx(1));
    CHECK((*e)[1].value() == cplx(4));
    CHECK((*e)[2].value() == cplx(9));

    auto t = normal_order(std::vector<RawEigenvalue>{{cplx(1, 1)}, {cplx(1, -1)}, {1.0}});
    auto f = t.entries(3);
    CHECK((*f)[0].value() == cplx(1, 0));
    CHECK((*f)[1].value() == cplx(1, -1));
    CHECK((*f)[2].value() == cplx(1, 1));
}

TEST_CASE("normal_order rejects bad input")
{
    CHECK_THROWS_AS(normal_order(std::vector<RawEigenvalue>{{1.0}, {-2.0}}), Error);
    try {
        normal_order(std::vector<RawEigenvalue>{{0.0}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositiveRealPart);
    }
    try {
        normal_order(std::vector<RawEigenvalue>{{2.0}, {1.0}, {2.0}});
        FAIL("duplicate accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateEntry);
    }
}

TEST_CASE("offset entries keep underflowing gaps exact")
{
    auto a = SpectralEntry::plain(100.0);
    auto b = SpectralEntry::offset(100.0, +1, -900.0);
    CHECK(log_gap(a, b) == doctest::Approx(-900.0));
    auto c = SpectralEntry::offset(100.0, -1, -900.0);
    CHECK(log_gap(b, c) == doctest::Approx(-900.0 + std::log(2.0)));
    CHECK(normally_before(c, a));
    CHECK(normally_before(a, b));
    auto seq = normal_order(std::vector<SpectralEntry>{b, a, c});
    CHECK(seq.entries(3)->at(1).offset_sign == 0);
    CHECK_THROWS_AS(normal_order(std::vector<SpectralEntry>{b, b}), Error);
}

TEST_CASE("check_hypotheses")
{
    auto heat = SpectralSequence::generated(power_rule(pi * pi, 2));
    auto r = check_hypotheses(heat, 100);
    CHECK(r.summability_exponent == doctest::Approx(2).epsilon(1e-9));
    CHECK(r.summable);
    CHECK(r.warnings.empty());

    auto osc = SpectralSequence::generated(harmonic_rule());
    auto h = check_hypotheses(osc, 100);
    CHECK(h.summability_exponent == doctest::Approx(1).epsilon(0.02));
    CHECK_FALSE(h.summable);
    REQUIRE(h.warnings.size() == 1);
    CHECK(h.warnings[0] == "HYP_SUMMABILITY_FAIL");

    std::vector<RawEigenvalue> raw;
    for (int k = 1; k <= 20; ++k)
        raw.push_back({double(k * k) * cplx(1, 1) / std::sqrt(2.0)});
    auto sec = check_hypotheses(normal_order(raw), 16);
    CHECK(sec.sector_delta_est == doctest::Approx(1 / std::sqrt(2.0)));

    CHECK_THROWS_AS(check_hypotheses(normal_order(std::vector<RawEigenvalue>{{1.0}}), 4), Error);
}

TEST_CASE("log_E_prime of a single factor")
{
    auto s = normal_order(std::vector<RawEigenvalue>{{1.0}});
    CHECK(log_E_prime(s, 1) == doctest::Approx(std::log(2.0)));
    CHECK(blaschke_log_wprime(s, 1) == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("log_E_prime matches the sine/sinh product for k^2 pi^2")
{
    // E(z) = sin(sqrt z) sinh(sqrt z)/z, E'(9 pi^2) = cos(3pi)/(2*9pi^2) * sinh(3pi)/(3pi)
    double oracle = std::log(std::sinh(3 * pi) / (3 * pi) / (18 * pi * pi));
    auto pref = squares_pi2(400);
    CHECK(std::abs(log_E_prime(pref, 3) - oracle) <= 1e-6 * std::abs(oracle));
    auto gen = SpectralSequence::generated(power_rule(pi * pi, 2));
    CHECK(std::abs(log_E_prime(gen, 3) - oracle) <= 1e-9 * std::abs(oracle));
    for (long k : {1L, 7L, 25L}) {
        double o = log_sinh(k * pi) - std::log(k * pi) - std::log(2.0 * k * k * pi * pi);
        CHECK(log_E_prime(gen, std::size_t(k)) == doctest::Approx(o).epsilon(1e-9));
    }
}

TEST_CASE("two-family closed form for |E'| at the first family")
{
    for (double d : {2.0, 5.0})
        for (bool scaled : {false, true}) {
            auto seq = SpectralSequence::generated(two_diffusion_rule(d, scaled ? pi * pi : 1.0));
            auto e = seq.entries(80);
            for (std::size_t i = 0; i < e->size(); ++i) {
                const auto& en = (*e)[i];
                if (en.family != 0 || en.family_index > 20)
                    continue;
                long k = en.family_index;
                double ref = log_eprime_two_family(k, d, scaled);
                double got = log_E_prime(seq, i + 1);
                CHECK(std::abs(got - ref) <= 1e-6 * std::abs(ref));
            }
        }
}

TEST_CASE("two-family closed form with the pi^3 denominator holds for the unscaled family")
{
    const double d = 2;
    auto seq = SpectralSequence::generated(two_diffusion_rule(d, 1.0));
    auto e = seq.entries(60);
    for (std::size_t i = 0; i < e->size(); ++i) {
        const auto& en = (*e)[i];
        if (en.family != 0 || en.family_index > 20)
            continue;
        double k = double(en.family_index);
        double ref = std::log(d) + log_sinh(k * pi) + log_sinh(k * pi / std::sqrt(d)) +
                     std::log(std::abs(std::sin(k * pi / std::sqrt(d)))) - std::log(2 * std::pow(k, 5) * std::pow(pi, 3));
        CHECK(log_E_prime(seq, i + 1) == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("truncation is stable under tightening the tail tolerance")
{
    for (auto rule : {power_rule(pi * pi, 2), appendix_b_rule(0.5), two_diffusion_rule(3.0, pi * pi)}) {
        auto seq = SpectralSequence::generated(rule);
        for (std::size_t k : {1u, 5u, 17u}) {
            double a = log_E_prime(seq, k, 1e-10);
            double b = log_E_prime(seq, k, 1e-14);
            CHECK(std::abs(a - b) < 1e-10);
            double c = blaschke_log_wprime(seq, k, 1e-10);
            double d = blaschke_log_wprime(seq, k, 1e-14);
            CHECK(std::abs(c - d) < 1e-10);
        }
    }
}

TEST_CASE("prefix that is too short cannot meet the tail bound")
{
    auto short_seq = squares_pi2(20);
    try {
        (void)blaschke_log_wprime(short_seq, 15, 1e-10);
        FAIL("expected TailBoundUnachievable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TailBoundUnachievable);
    }
}

TEST_CASE("condensation profile of k^2 pi^2 tends to zero")
{
    auto seq = SpectralSequence::generated(power_rule(pi * pi, 2));
    auto p = condensation_profile(seq, 30);
    CHECK(std::abs(p.tail_estimate) <= 0.02);
    for (std::size_t i = 1; i < p.size(); ++i)
        CHECK(p.running_sup[i] >= p.running_sup[i - 1]);
    CHECK(p.tail_estimate <= p.running_sup.back());
}

TEST_CASE("Bohr profile")
{
    auto heat = SpectralSequence::generated(power_rule(pi * pi, 2));
    auto b = bohr_profile(heat, 30);
    for (std::size_t i = 0; i < b.size(); ++i) {
        double k = double(b.k[i]);
        double expect = -std::log((k > 1 ? 2 * k - 1 : 3.0) * pi * pi) / (k * k * pi * pi);
        CHECK(b.value[i] == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(std::abs(b.tail_estimate) < 0.01);

    auto ab = SpectralSequence::generated(appendix_b_rule(1.0));
    auto pb = bohr_profile(ab, 60);
    for (std::size_t i = 0; i + 1 < pb.size(); i += 2) {
        CHECK(pb.partner[i] == long(i + 2));
        CHECK(pb.value[i] == doctest::Approx(1.0).epsilon(1e-12));
    }

    // partner of m^2 pi^2 is d j^2 pi^2 with j the nearest integer to m/sqrt(d)
    const double d = 2;
    auto td = SpectralSequence::generated(two_diffusion_rule(d, pi * pi));
    auto e = td.entries(200);
    auto pt = bohr_profile(td, 120);
    int checked = 0;
    for (std::size_t i = 0; i < pt.size(); ++i) {
        const auto& en = (*e)[i];
        if (en.family != 0 || en.family_index < 3)
            continue;
        const auto& partner = (*e)[std::size_t(pt.partner[i] - 1)];
        double ratio = double(en.family_index) / std::sqrt(d);
        long j = std::lround(ratio);
        CHECK(partner.family == 1);
        // near half-integers both neighbours are at comparable distance
        if (std::abs(ratio - double(j)) < 0.4)
            CHECK(partner.family_index == j);
        else
            CHECK(std::abs(double(partner.family_index) - ratio) < 1.0);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("near-pair family k^2, k^2 + e^{-tau k^2} converges to tau at large k")
{
    for (double tau : {0.25, 1.0}) {
        auto seq = SpectralSequence::generated(appendix_b_rule(tau));
        auto c = condensation_profile(seq, 600, 1e-10, 20);
        auto w = blaschke_profile(seq, 600, 1e-10, 20);
        auto b = bohr_profile(seq, 600, 20);
        // finite-k corrections are of order 2 pi / k
        CHECK(std::abs(c.tail_estimate - tau) <= 0.1 * tau);
        CHECK(std::abs(w.tail_estimate - tau) <= 0.1 * tau);
        CHECK(b.tail_estimate == doctest::Approx(tau).epsilon(1e-9));
        CHECK(b.tail_estimate <= c.tail_estimate + 0.1 * tau);
        // the E'-profile approaches from below, the Blaschke one from above
        CHECK(c.tail_estimate < tau);
        CHECK(w.tail_estimate > tau);
    }
}

TEST_CASE("Blaschke and E' profiles on k^2 pi^2")
{
    auto seq = SpectralSequence::generated(power_rule(pi * pi, 2));
    double lam2 = 4 * pi * pi;
    double vc = -log_E_prime(seq, 2) / lam2;
    double vb = -blaschke_log_wprime(seq, 2) / lam2;
    // both are O(1/k) at this scale; they agree to the size of that correction
    CHECK(std::abs(vc - vb) < 2 * pi / 2);
    auto c = condensation_profile(seq, 200);
    auto w = blaschke_profile(seq, 200);
    CHECK(std::abs(c.tail_estimate) < 0.01);
    CHECK(std::abs(w.tail_estimate) < 0.01);
    CHECK(bohr_profile(seq, 200).tail_estimate <= c.tail_estimate + 0.01);
}

TEST_CASE("profiles are invariant under permutation of the raw input")
{
    std::mt19937_64 rng(20240611);
    std::vector<RawEigenvalue> raw;
    for (int k = 1; k <= 40; ++k)
        raw.push_back({cplx(double(k * k) + 0.25 * k, 0.1 * k)});
    auto ref = normal_order(raw);
    auto pc = condensation_profile(ref, 40);
    auto pb = bohr_profile(ref, 40);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(raw.begin(), raw.end(), rng);
        auto s = normal_order(raw);
        auto qc = condensation_profile(s, 40);
        auto qb = bohr_profile(s, 40);
        for (std::size_t i = 0; i < 40; ++i) {
            CHECK(qc.value[i] == pc.value[i]);
            CHECK(qb.value[i] == pb.value[i]);
        }
    }
}

TEST_CASE("Hurwitz zeta")
{
    CHECK(hurwitz_zeta(2, 1) == doctest::Approx(pi * pi / 6).epsilon(1e-14));
    CHECK(hurwitz_zeta(4, 1) == doctest::Approx(boost::math::zeta(4.0)).epsilon(1e-14));
    double direct = 0;
    for (int n = 0; n < 2000000; ++n)
        direct += std::pow(7.5 + n, -3.0);
    direct += 0.5 * std::pow(7.5 + 2000000, -2.0);
    CHECK(hurwitz_zeta(3, 7.5) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(hurwitz_zeta(8, 1e5) == doctest::Approx(std::pow(1e5, -7) / 7 + 0.5 * std::pow(1e5, -8)).epsilon(1e-10));
}
