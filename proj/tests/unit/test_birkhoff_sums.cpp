#include "doctest.h"
#include "oracles.hpp"

#include "toruslab/birkhoff_sums.hpp"
#include "toruslab/error.hpp"

#include <cmath>
#include <random>

using namespace toruslab;

TEST_SUITE("birkhoff_sums") {

TEST_CASE("psi triple")
{
    auto t = psi_eval(Rational(1, 4));
    CHECK(t.psi1 == 4);
    CHECK(t.psi2 == Rational(4, 3));
    CHECK(t.psi == 4);
    auto h = psi_eval(Rational(1, 2));
    CHECK(h.psi1 == 2);
    CHECK(h.psi2 == 2);
    CHECK_THROWS_AS(psi_eval(Rational(3)), Error);
}

TEST_CASE("exact sums match the naive oracle")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    CHECK(birkhoff_sum(s, Rational(1, 7), 12) == oracle::birkhoff(s.value(), Rational(1, 7), 12));
    CHECK(birkhoff_sum(s, Rational(1, 7), 1) == 7);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> num(1, 996);
    for (int t = 0; t < 20; ++t) {
        Rational x(num(rng), 997);
        CHECK(birkhoff_sum(s, x, 60) == oracle::birkhoff(s.value(), x, 60));
        CHECK(birkhoff_sum_range(s, x, 20, 60) + birkhoff_sum(s, x, 20) == birkhoff_sum(s, x, 60));
    }
}

TEST_CASE("orbit through the pole reports its index")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    try {
        birkhoff_sum(s, -5 * s.value(), 10);
        FAIL("expected OrbitHitsPole");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrbitHitsPole);
        CHECK(e.index() == 5);
    }
}

TEST_CASE("double mode tracks exact mode within its error bound")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    Rational x(3, 11);
    auto ex = birkhoff_S(s, x, 500, Mode::Exact);
    auto db = birkhoff_S(s, x, 500, Mode::Double);
    REQUIRE(ex.size() == 500);
    REQUIRE(db.size() == 500);
    for (std::size_t k = 0; k < 500; ++k) {
        double e = to_double(ex.exact[k]);
        CHECK(std::fabs(db.approx[k] - e) <= e * (db.rel_error_bound + 1e-14));
    }
    auto ds = birkhoff_sum_double(s, x, 500);
    CHECK(std::fabs(ds.value - to_double(ex.exact.back())) <= ds.value * (ds.rel_error_bound + 1e-14));
    CHECK_FALSE(ds.condition_flag);
    CHECK_THROWS_AS(birkhoff_S(s, x, 0, Mode::Double), Error);
}

TEST_CASE("theta and the involution")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    Rational x(1, 7), beta(1, 3);
    CHECK(theta(s, x, 0, 10) == 1);
    Rational direct = oracle::birkhoff(s.value(), x, 10) / oracle::birkhoff(s.value(), x - beta, 10);
    CHECK(theta(s, x, beta, 10) == direct);
    CHECK(j_involution(s, 1, 0, Rational(1, 4)) == Rational(3, 4));
    for (std::int64_t n : {3, 10, 25}) {
        Rational jx = j_involution(s, n, beta, x);
        CHECK(j_involution(s, n, beta, jx) == x);
        CHECK(theta(s, jx, beta, n) * theta(s, x, beta, n) == 1);
    }
    CHECK(std::fabs(theta_double(s, x, beta, 10) - to_double(direct)) < 1e-12);
}

}
