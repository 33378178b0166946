#include "doctest.h"
#include "oracles.hpp"

#include "toruslab/classifiers.hpp"
#include "toruslab/error.hpp"

#include <cmath>
#include <numeric>

using namespace toruslab;

namespace {

FlowParams flow_for(const Angle& angle, const Rational& beta)
{
    FlowParams fp{angle, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), frac(Rational(1, 2) + beta)}};
    return fp;
}

}  // namespace

TEST_SUITE("classifiers") {

TEST_CASE("pqk index gives a coprime value")
{
    CHECK(std::gcd(2 + 3 * pqk_index(2, 3, 6).get_si(), 6L) == 1);
    for (int a = 0; a < 30; ++a)
        for (int b = 1; b < 30; ++b) {
            if (std::gcd(a, b) != 1)
                continue;
            for (int c = 1; c < 60; ++c) {
                Integer i = pqk_index(a, b, c);
                CHECK(i >= 1);
                CHECK(std::gcd(a + i.get_si() * b, c) == 1);
            }
        }
    CHECK_THROWS_AS(pqk_index(2, 4, 3), Error);
}

TEST_CASE("ceil_power against integer search")
{
    for (int q = 1; q < 300; ++q) {
        for (double nu : {0.5, 1.0, 1.5, 2.0, 1.0 / 3.0}) {
            Integer c = ceil_power(q, nu);
            // smallest integer m with m >= q^nu
            Integer m = 1;
            auto ge = [&](const Integer& v) {
                if (nu == 0.5)
                    return v * v >= q;
                if (nu == 1.0)
                    return v >= q;
                if (nu == 1.5)
                    return v * v >= Integer(q) * q * q;
                if (nu == 2.0)
                    return v >= Integer(q) * q;
                return v * v * v >= q;
            };
            while (!ge(m))
                ++m;
            CHECK(c == m);
            CHECK(power_at_least(m, q, nu));
            if (m > 1)
                CHECK_FALSE(power_at_least(m - 1, q, nu));
        }
    }
}

TEST_CASE("constructed W angle carries its witnesses")
{
    Angle w = construct_w_angle(1, 3, {0, 4, 7}, 3);
    auto c = w_membership(w, 1, 3, w.horizon());
    REQUIRE(c.witnesses.size() >= 3);
    for (const auto& wit : c.witnesses) {
        CHECK(w.q(wit.n) % 3 != 0);
        CHECK(w.a(wit.n + 1) >= w.q(wit.n));
    }
    Angle g = Angle::from_quotients(oracle::repeated(1, 30));
    for (const auto& wit : w_membership(g, 1, 1, 25).witnesses)
        CHECK(wit.n < 2);
    CHECK(liouville_witnesses(g, 1, 25).witnesses.empty());
    CHECK(liouville_witnesses(g, 0, 25).witnesses.empty());
}

TEST_CASE("rapid growth construction")
{
    Angle r = construct_rapid_growth_angle(1, 0.5, 5);
    CHECK(r.q(0) == 1);
    CHECK(r.q(1) == 4);
    CHECK(r.q(2) == 293);
    CHECK(r.q(3) == 5888718);
    auto c = growth_check(r, 1, 0.5, 5);
    for (const auto& wit : c.witnesses)
        if (wit.n >= 1)
            CHECK(wit.holds);
    Angle g = Angle::from_quotients(oracle::repeated(1, 30));
    auto gc = growth_check(g, 1, 0.1, 20);
    CHECK_FALSE(gc.witnesses[3].holds);
    CHECK_THROWS_AS(construct_rapid_growth_angle(1, 0.5, 9), Error);
}

TEST_CASE("inverse log sums")
{
    Angle g = Angle::from_quotients(oracle::repeated(1, 30));
    CHECK(khinchin_levy_partial(g, 20).back() == 0.0L);
    auto s = sum_inv_log_a(g, 10);
    CHECK(s.divergent);
    CHECK(s.flagged.size() == 10);
    Angle two = Angle::from_quotients(oracle::repeated(2, 30));
    auto k = khinchin_levy_partial(two, 10);
    CHECK(k[3] == doctest::Approx(static_cast<double>(1 / log_of(Integer(2)) +
                                                      1 / log_of(Integer(5)) +
                                                      1 / log_of(Integer(12)))));
}

TEST_CASE("same orbit detection and generic beta")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 20));
    Rational p0(1, 3);
    CHECK(same_orbit_detect(s, p0, frac(p0 + 7 * s.value()), 100) == 7);
    CHECK(same_orbit_detect(s, p0, frac(p0 - 4 * s.value()), 100) == -4);
    CHECK(same_orbit_detect(s, p0, p0, 100) == 0);
    CHECK_FALSE(same_orbit_detect(s, p0, Rational(1, 5), 100));
    CHECK(generic_beta(s, 2, 1) == Rational(3, 10));
}

TEST_CASE("regime verdicts")
{
    Angle r = construct_rapid_growth_angle(1, 0.5, 5);
    auto v = regime_verdict(r, flow_for(r, frac(r.value())), r.horizon());
    CHECK(v.regime == Regime::PhysicalMeasure);
    Angle w = construct_w_angle(1, 3, {0, 4, 7}, 3);
    auto vw = regime_verdict(w, flow_for(w, Rational(1, 3)), w.horizon());
    CHECK(vw.regime == Regime::ExtremeHistoric);
    Angle s = Angle::from_quotients(oracle::repeated(2, 40));
    auto vs = regime_verdict(s, flow_for(s, Rational(1, 3)), 20);
    CHECK(vs.regime == Regime::NoTheorem);
    CHECK(std::string(to_string(Regime::Historic)) == "historic");
}

}
