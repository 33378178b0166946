#include "doctest.h"
#include "oracles.hpp"

#include "toruslab/error.hpp"
#include "toruslab/flow_dynamics.hpp"

#include <cmath>
#include <numbers>

using namespace toruslab;

TEST_SUITE("flow_dynamics") {

TEST_CASE("principal roof at a quarter")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    double pi2 = std::numbers::pi * std::numbers::pi;
    FlowParams fp{s, {0, 0}, {0, Rational(1, 2)}, pi2, pi2};
    fp.section_x0 = Rational(1, 2);
    SectionData sec;
    sec.p0 = 0;
    sec.q0 = Rational(1, 2);
    CHECK(roof(fp, sec, Rational(1, 4)) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK_THROWS_AS(roof(fp, sec, Rational(1, 2)), Error);
}

TEST_CASE("limit weights")
{
    auto m = mu_infinity(4, 1);
    CHECK(m.weight_p == doctest::Approx(1.0 / 3));
    CHECK(m.weight_q == doctest::Approx(2.0 / 3));
    auto e = mu_infinity(2, 2);
    CHECK(e.weight_p == doctest::Approx(0.5));
    CHECK_THROWS_AS(mu_infinity(0, 1), Error);
}

TEST_CASE("kappa closed form against quadrature")
{
    auto k = kappa_quadratic(1, 0, 1, 1, 1);
    CHECK(k.closed_form == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
    CHECK(std::fabs(k.quadrature - k.closed_form) < 1e-10);
    auto k2 = kappa_quadratic(2, 0.5, 3, 0.2, 0.01);
    CHECK(std::fabs(k2.quadrature - k2.closed_form) < 1e-10 * k2.closed_form);
    CHECK_THROWS_AS(kappa_quadratic(1, 2, 1, 1, 1), Error);
    CHECK_THROWS_AS(kappa_quadratic(1, 0, 1, 1, 0), Error);
}

TEST_CASE("adaptive quadrature")
{
    auto q = integrate_adaptive([](double x) { return std::exp(x); }, 0, 1);
    CHECK(std::fabs(q.value - (std::exp(1.0) - 1)) < 1e-13);
    auto r = integrate_adaptive([](double x) { return 1 / (1 + x * x); }, -50, 50);
    CHECK(std::fabs(r.value - 2 * std::atan(50.0)) < 1e-12);
}

TEST_CASE("section setup and linear flow")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 30));
    FlowParams fp{s, {Rational(1, 4), Rational(1, 3)}, {Rational(3, 4), Rational(1, 5)}};
    auto sec = section_setup(fp);
    CHECK(sec.beta == frac(sec.q0 - sec.p0));
    auto back_p = linear_flow(s, {sec.x0, sec.p0}, sec.r_p);
    CHECK(back_p.x == fp.p.x);
    CHECK(back_p.y == fp.p.y);
    auto back_q = linear_flow(s, {sec.x0, sec.q0}, sec.r_q);
    CHECK(back_q.x == fp.q.x);
    CHECK(back_q.y == fp.q.y);
}

TEST_CASE("special flow occupancies add up")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 40));
    FlowParams fp{s, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), frac(Rational(1, 2) + 3 * s.value())}};
    SpecialFlowOptions opt;
    opt.returns = 2000;
    opt.mode = Mode::Exact;
    auto series = special_flow_simulate(fp, Rational(1, 7), opt);
    REQUIRE_FALSE(series.rows.empty());
    for (const auto& r : series.rows) {
        CHECK(r.T == doctest::Approx(r.A + r.B + r.C));
        CHECK(r.occ_p == doctest::Approx(r.A / r.T));
        CHECK(r.occ_p + r.occ_q <= 1.0 + 1e-12);
        REQUIRE(r.occ_p_exact);
        CHECK(to_double(*r.occ_p_exact) == doctest::Approx(r.occ_p));
    }
    opt.mode = Mode::Double;
    auto d = special_flow_simulate(fp, Rational(1, 7), opt);
    REQUIRE(d.rows.size() == series.rows.size());
    CHECK(d.rows.back().occ_p == doctest::Approx(series.rows.back().occ_p).epsilon(1e-9));
}

TEST_CASE("orbit reaching a cusp is reported")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 40));
    FlowParams fp{s, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 3)}};
    auto sec = section_setup(fp);
    SpecialFlowOptions opt;
    opt.returns = 50;
    try {
        special_flow_simulate(fp, frac(sec.p0 - 6 * s.value()), opt);
        FAIL("expected OrbitHitsCusp");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrbitHitsCusp);
        CHECK(e.index() == 6);
    }
}

TEST_CASE("Euler scheme with unit speed follows the linear flow")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 40));
    FlowParams fp{s, {Rational(1, 4), Rational(1, 4)}, {Rational(3, 4), Rational(3, 4)}};
    EulerOptions opt;
    opt.delta = 0.01;
    opt.steps = 1000;
    opt.unit_speed = true;
    opt.trajectory_limit = 1000;
    auto run = euler_torus_simulate(fp, {0.1, 0.2}, opt);
    REQUIRE(run.trajectory.size() == 1000);
    double a = to_double(s.value());
    for (const auto& pt : run.trajectory) {
        double t = 0.01 * static_cast<double>(pt.step);
        double ex = std::fmod(0.1 + t, 1.0), ey = std::fmod(0.2 + a * t, 1.0);
        CHECK(std::fabs(pt.x - ex) < 1e-9);
        CHECK(std::fabs(pt.y - ey) < 1e-9);
    }
    double occ = euler_box_occupancy(s, {0.1, 0.2}, 0.01, 100000, 0.0, 0.5, 0.0, 0.5);
    CHECK(occ == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("Euler stagnation at a stopping point")
{
    Angle s = Angle::from_quotients(oracle::repeated(2, 40));
    FlowParams fp{s, {Rational(1, 4), Rational(1, 4)}, {Rational(3, 4), Rational(3, 4)}};
    fp.speed_model = SpeedModel::MinDistance;
    EulerOptions opt;
    opt.steps = 100;
    CHECK_THROWS_AS(euler_torus_simulate(fp, {0.25, 0.25}, opt), Error);
}

TEST_CASE("empty bands and tail extremes")
{
    auto bands = empty_bands({0.1, 0.15, 0.5, 0.52}, 0.1);
    REQUIRE(bands.size() == 2);
    CHECK(bands[0].lo == doctest::Approx(0.15));
    CHECK(bands[0].hi == doctest::Approx(0.5));
    CHECK(bands[1].lo == doctest::Approx(0.52));
    CHECK(bands[1].hi == doctest::Approx(1.1));
    auto [lo, hi] = pomega_estimate({0.9, 0.1, 0.4, 0.6, 0.5}, 0.6);
    CHECK(lo == doctest::Approx(0.4));
    CHECK(hi == doctest::Approx(0.6));
    CHECK_THROWS_AS(pomega_estimate({}, 0.5), Error);
}

}
