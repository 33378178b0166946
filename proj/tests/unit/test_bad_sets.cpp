#include "doctest.h"
#include "oracles.hpp"

#include "toruslab/bad_sets.hpp"
#include "toruslab/classifiers.hpp"
#include "toruslab/error.hpp"

#include <cmath>
#include <random>

using namespace toruslab;

TEST_SUITE("bad_sets") {

TEST_CASE("E_{3,1} for sqrt2 - 1 has measure 12 lambda^{(3)}")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    auto E = build_E(s, 3, 1);
    CHECK(E.measure() == 12 * s.lambda(3));
    CHECK(std::fabs(to_double(E.measure()) - 0.35325) < 1e-5);
    CHECK(E.arcs_disjoint());
    auto cert = e_measure_certified(s, 3, 1);
    CHECK(cert.disjoint);
    CHECK(cert.measure == E.measure());
    CHECK(E.contains(frac(-5 * s.value())));
    CHECK_THROWS_AS(build_E(s, 3, 3), Error);
}

TEST_CASE("first close visit agrees with scanning")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    Rational w = s.lambda(3) / 2;
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> num(0, 9999);
    for (int t = 0; t < 100; ++t) {
        Rational x(num(rng), 10000);
        x.canonicalize();
        std::optional<std::int64_t> expect;
        for (std::int64_t k = 0; k < 12; ++k)
            if (oracle::norm(x + Rational(k) * s.value()) < w) {
                expect = k;
                break;
            }
        CHECK(first_close_visit(s, x, 12, w) == expect);
        CHECK(build_E(s, 3, 1).contains(x) == expect.has_value());
    }
    for (int t = 0; t < 50; ++t)
        CHECK(build_E(s, 3, 1).contains(sample_E(s, 3, 1, rng)));
}

TEST_CASE("bad index from the definition")
{
    Angle g = Angle::from_quotients(oracle::repeated(1, 30));
    auto [n, k] = bad_index(g, 10);
    CHECK(n == 5);
    CHECK(k == 1);
    for (int i = 1; i < 500; ++i) {
        auto [m, j] = bad_index(g, i);
        CHECK(g.q(m) <= i);
        CHECK(g.q(m + 1) > i);
        CHECK(j == Integer(i) / g.q(m));
    }
}

TEST_CASE("exact membership agrees with the built union")
{
    Angle angle = Angle::from_quotients(oracle::repeated(2, 20));
    auto u = schedule_loglog();
    auto v = schedule_v_default();
    for (int n = 2; n <= 4; ++n) {
        auto lvl = build_bad_sets(angle, u, v, n);
        REQUIRE(lvl.D);
        std::mt19937_64 rng(n);
        std::uniform_int_distribution<int> num(0, 99999);
        for (int t = 0; t < 300; ++t) {
            Rational x(num(rng), 100000);
            x.canonicalize();
            CHECK(in_bad_set(angle, u, n, x) == lvl.D->contains(x));
        }
        CHECK(to_double(lvl.D->measure()) <= static_cast<double>(lvl.union_bound) * (1 + 1e-12));
    }
}

TEST_CASE("ledger rows accumulate")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    auto rows = bad_set_ledger(s, schedule_power(1.0L), schedule_v_default(), 1, 7);
    REQUIRE(rows.size() == 6);
    long double sum = 0;
    for (const auto& r : rows) {
        sum += r.measure;
        CHECK(std::fabs(static_cast<double>(r.partial_sum - sum)) < 1e-12);
        CHECK(r.measure >= 0);
    }
}

TEST_CASE("schedules")
{
    CHECK(schedule_power(2.0L).value(3) == doctest::Approx(9.0));
    CHECK(schedule_loglog().value(1) == doctest::Approx(std::log(std::log(4.0))));
    CHECK(schedule_v_default().value(1) == doctest::Approx(std::ceil(std::log(3.0))));
}

TEST_CASE("golden escape-series ladder with phi = lambda^{(n-1)}")
{
    Angle g = Angle::from_quotients(oracle::repeated(1, 40));
    auto phi = [&](int n) { return static_cast<long double>(to_double(g.lambda(n - 1))); };
    auto s = escape_series(g, phi, 30);
    REQUIRE(s.size() >= 30);
    long double prev = 0;
    for (int n = 1; n <= 30; ++n) {
        long double term = s[static_cast<std::size_t>(n - 1)] - prev;
        long double expect = to_double(Integer(g.q(n) - g.q(n - 1))) * to_double(g.lambda(n - 1));
        CHECK(std::fabs(static_cast<double>(term - expect)) < 1e-12);
        prev = s[static_cast<std::size_t>(n - 1)];
    }
}

TEST_CASE("escape inequality outside the bad set")
{
    Angle angle = construct_rapid_growth_angle(1, 0.5, 5);
    auto u = schedule_loglog();
    int n = 2;
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> num(0, 999999);
    std::uniform_int_distribution<std::int64_t> pick(to_int64(angle.q(n)), to_int64(angle.q(n + 1)) - 1);
    int checked = 0;
    while (checked < 20) {
        Rational x(num(rng), 1000000);
        x.canonicalize();
        if (in_bad_set(angle, u, n, x))
            continue;
        CHECK(bad_set_escape_check(angle, u, n, x, pick(rng), x, Mode::Double).holds);
        ++checked;
    }
}

}
