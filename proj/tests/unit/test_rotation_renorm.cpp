#include "doctest.h"
#include "oracles.hpp"

#include "toruslab/error.hpp"
#include "toruslab/rotation_renorm.hpp"

#include <algorithm>
#include <random>

using namespace toruslab;

TEST_SUITE("rotation_renorm") {

TEST_CASE("near-rational bijection for sqrt2 - 1 at level 2")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 12));
    auto sigma = near_rational_bijection(s, 2);
    std::vector<std::int64_t> expected{0, 2, 4, 1, 3};
    CHECK(sigma == expected);
    Angle g = Angle::from_quotients(oracle::repeated(1, 12));
    CHECK_THROWS_AS(near_rational_bijection(g, 3), Error);
}

TEST_CASE("orbit gaps agree with sorting and the three-distance identities")
{
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::int64_t> pick(1, 7);
    for (int t = 0; t < 8; ++t) {
        std::vector<std::int64_t> a{0};
        for (int i = 0; i < 12; ++i)
            a.push_back(pick(rng));
        Angle angle = Angle::from_quotients(a);
        for (int n = 1; n <= angle.horizon() && angle.q(n) <= 2000; ++n) {
            auto seg = orbit(angle, 0, to_int64(angle.q(n)));
            auto pts = seg.points;
            std::sort(pts.begin(), pts.end());
            Rational lo = 1, hi = 0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                Rational g = (i + 1 < pts.size() ? pts[i + 1] : Rational(1) + pts[0]) - pts[i];
                lo = std::min(lo, g);
                hi = std::max(hi, g);
            }
            auto st = gap_stats(angle, seg);
            CHECK(st.identities_checked);
            CHECK(st.min_gap == lo);
            CHECK(st.max_gap == hi);
            CHECK(lo == angle.lambda(n - 1));
            CHECK(hi == angle.lambda(n - 1) + angle.lambda(n));
        }
        auto odd = orbit(angle, Rational(1, 3), 7);
        CHECK_FALSE(gap_stats(angle, odd).identities_checked);
    }
}

TEST_CASE("orbit decomposition m = ell q_n + r")
{
    Angle angle = Angle::from_quotients(std::vector<std::int64_t>{0, 3, 2, 4, 1, 2, 3});
    for (std::int64_t m = 1; m < to_int64(angle.q(4)); ++m) {
        auto d = orbit_decomposition(angle, m, 3);
        CHECK(d.holds);
        CHECK(d.ell * to_int64(angle.q(3)) + d.r == m);
    }
    CHECK_THROWS_AS(orbit_decomposition(angle, to_int64(angle.q(4)), 3), Error);
}

TEST_CASE("renormalization towers partition the circle")
{
    Angle angle = Angle::from_quotients(std::vector<std::int64_t>{0, 2, 1, 3, 5, 1, 2, 4, 2});
    for (int n = 0; n + 1 <= angle.horizon(); ++n) {
        auto lvl = renorm_level(angle, n);
        CHECK(verify_partition(angle, lvl));
        CHECK(lvl.delta_n.length == angle.lambda(n));
        CHECK(lvl.delta_n1.length == angle.lambda(n + 1));
        CHECK(lvl.large_floors == angle.q(n + 1));
        CHECK(lvl.small_floors == angle.q(n));
    }
}

TEST_CASE("tower addresses point back into the base")
{
    Angle angle = Angle::from_quotients(std::vector<std::int64_t>{0, 2, 3, 1, 4, 2, 2});
    int n = 3;
    auto lvl = renorm_level(angle, n);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> num(0, 9999);
    for (int t = 0; t < 200; ++t) {
        Rational x(num(rng), 10000);
        x.canonicalize();
        auto addr = tower_address(angle, x, n);
        const Arc& base = addr.tower == Tower::Large ? lvl.delta_n : lvl.delta_n1;
        CHECK(base.contains(addr.base_point));
        CHECK(frac(addr.base_point + Rational(to_integer(addr.floor)) * angle.value()) == x);
        std::int64_t height = to_int64(addr.tower == Tower::Large ? angle.q(n + 1) : angle.q(n));
        CHECK(addr.floor < height);
    }
}

TEST_CASE("first return to the renormalized interval")
{
    Angle angle = Angle::from_quotients(std::vector<std::int64_t>{0, 2, 2, 3, 1, 4, 2, 2});
    for (int n = 1; n <= 3; ++n) {
        auto lvl = renorm_level(angle, n);
        std::vector<Rational> samples;
        for (int k = 1; k < 10; ++k)
            samples.push_back(lvl.delta_n.start + lvl.delta_n.length * Rational(k, 10));
        for (const auto& rec : first_return_check(angle, n, samples)) {
            CHECK(rec.time_ok);
            CHECK(rec.rotation_ok);
        }
    }
}

}
