#include "doctest.h"

#include "toruslab/error.hpp"
#include "toruslab/interval_union.hpp"

#include <random>

using namespace toruslab;

namespace {

bool naive_contains(const std::vector<CenteredArc>& arcs, const Rational& x)
{
    for (const auto& a : arcs) {
        Rational d = circle_norm(x - a.center);
        if (d < a.half_width || (a.closed && d == a.half_width))
            return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("interval_union") {

TEST_CASE("single arc wrapping through zero")
{
    auto u = IntervalUnion::from_arcs({{Rational(1, 20), Rational(1, 10)}});
    CHECK(u.measure() == Rational(1, 5));
    CHECK(u.intervals().size() == 2);
    CHECK(u.contains(Rational(0)));
    CHECK(u.contains(Rational(39, 40)));
    CHECK_FALSE(u.contains(Rational(19, 20)));
    CHECK_FALSE(u.contains(Rational(3, 20)));
    CHECK_FALSE(u.contains(Rational(17, 20)));
}

TEST_CASE("measure and membership agree with a grid count")
{
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> c(0, 999), w(1, 80);
    for (int t = 0; t < 20; ++t) {
        std::vector<CenteredArc> arcs;
        for (int i = 0; i < 12; ++i) {
            CenteredArc a{Rational(c(rng), 1000), Rational(w(rng), 1000)};
            a.center.canonicalize();
            a.half_width.canonicalize();
            arcs.push_back(a);
        }
        auto u = IntervalUnion::from_arcs(arcs);
        // All endpoints lie on the 1/1000 grid, so midpoints of grid cells decide the measure.
        int inside = 0;
        for (int k = 0; k < 1000; ++k) {
            Rational mid(2 * k + 1, 2000);
            mid.canonicalize();
            bool in = naive_contains(arcs, mid);
            CHECK(u.contains(mid) == in);
            inside += in ? 1 : 0;
        }
        CHECK(u.measure() == ratio(inside, 1000));
        Rational sum = 0;
        for (const auto& a : arcs)
            sum += 2 * a.half_width;
        CHECK(u.arcs_disjoint() == (sum == u.measure()));
        for (int s = 0; s < 50; ++s)
            CHECK(u.contains(u.sample(rng)));
    }
}

TEST_CASE("invalid half widths are rejected")
{
    CHECK_THROWS_AS(IntervalUnion::from_arcs({{Rational(0), Rational(0)}}), Error);
    CHECK_THROWS_AS(IntervalUnion::from_arcs({{Rational(0), Rational(1, 2)}}), Error);
}

}
