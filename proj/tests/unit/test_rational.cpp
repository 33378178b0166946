#include "doctest.h"

#include "toruslab/error.hpp"
#include "toruslab/rational.hpp"

#include <cmath>
#include <random>

using namespace toruslab;

TEST_SUITE("rational") {

TEST_CASE("floor, ceil and frac on negative values")
{
    CHECK(floor_of(Rational(-7, 2)) == -4);
    CHECK(ceil_of(Rational(-7, 2)) == -3);
    CHECK(frac(Rational(-1, 3)) == Rational(2, 3));
    CHECK(circle_norm(Rational(5, 7)) == Rational(2, 7));
    CHECK(circle_norm(Rational(-9, 4)) == Rational(1, 4));
}

TEST_CASE("ratio canonicalizes")
{
    Rational r = ratio(Integer(6), Integer(-4));
    CHECK(r.get_num() == -3);
    CHECK(r.get_den() == 2);
}

TEST_CASE("parse_rational accepts fractions, integers and decimals")
{
    CHECK(parse_rational("3/9") == Rational(1, 3));
    CHECK(parse_rational("-12") == -12);
    CHECK(parse_rational("0.1972348") == ratio(1972348, 10000000));
    CHECK(parse_rational("1e-6") == Rational(1, 1000000));
    CHECK(parse_rational("2.5E3") == 2500);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("to_decimal rounds to the requested significant digits")
{
    CHECK(to_decimal(Rational(1, 3)) == "0.333333333333333333");
    CHECK(to_decimal(Rational(2, 3), 5) == "0.66667");
    CHECK(to_decimal(Rational(0)) == "0");
    CHECK(to_decimal(Rational(-1, 8)) == "-0.125");
    CHECK(to_fraction(ratio(4, 6)) == "2/3");
}

TEST_CASE("exact_rational is the exact value of a double")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int i = 0; i < 200; ++i) {
        double d = U(rng);
        CHECK(to_double(exact_rational(d)) == d);
    }
    CHECK(exact_rational(0.5) == Rational(1, 2));
}

TEST_CASE("log_of stays accurate past double range")
{
    Integer big;
    mpz_ui_pow_ui(big.get_mpz_t(), 10, 400);
    CHECK(static_cast<double>(log_of(big)) == doctest::Approx(400 * std::log(10.0)).epsilon(1e-15));
    CHECK(static_cast<double>(log_of(Rational(1, 1000))) == doctest::Approx(-std::log(1000.0)));
}

TEST_CASE("int64 conversions")
{
    CHECK(to_int64(to_integer(-42)) == -42);
    Integer huge;
    mpz_ui_pow_ui(huge.get_mpz_t(), 2, 70);
    CHECK_FALSE(fits_int64(huge));
    CHECK_THROWS_AS(to_int64(huge), Error);
}

TEST_CASE("circle point shadow")
{
    CirclePoint p(Rational(-1, 4));
    CHECK(p.value == Rational(3, 4));
    CHECK(p.shadow == 0.75);
    CHECK(p.shadow_reliable());
    CHECK_FALSE(CirclePoint(ratio(Integer(1), Integer("1000000000000000"))).shadow_reliable());
}

}
