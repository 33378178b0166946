#include "doctest.h"
#include "oracles.hpp"

#include "toruslab/serialize.hpp"

#include <charconv>

using namespace toruslab;

TEST_SUITE("serialize") {

TEST_CASE("sha256 known vectors")
{
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("real_text round trips")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) {
        std::string t = real_text(v);
        double back = 0;
        std::from_chars(t.data(), t.data() + t.size(), back);
        CHECK(back == v);
    }
    CHECK(real_text(0.5) == "0.5");
}

TEST_CASE("angle json")
{
    Angle a = Angle::from_quotients(oracle::repeated(2, 5));
    Json j = to_json(a);
    CHECK(j["quotients"].size() == 6);
    CHECK(j["depth"] == 5);
    CHECK(j["rows"].size() == 6);
    CHECK(j["rows"][3]["q"] == "12");
    CHECK(j["alpha_exact"] == "29/70");
}

TEST_CASE("error json")
{
    Json j = to_json(Error(ErrorKind::OrbitHitsPole, "hit", 5));
    CHECK(j["error"] == "OrbitHitsPole");
    CHECK(j["index"] == 5);
    CHECK_FALSE(to_json(Error(ErrorKind::RangeError, "x")).contains("index"));
}

TEST_CASE("quotient parsing")
{
    auto q = parse_quotients("0, 2,3,4");
    REQUIRE(q.size() == 4);
    CHECK(q[2] == 3);
    CHECK_THROWS(parse_quotients("0,x"));
}

TEST_CASE("csv headers")
{
    Angle a = Angle::from_quotients(oracle::repeated(2, 20));
    auto s = birkhoff_S(a, Rational(1, 7), 5, Mode::Exact);
    std::string csv = sum_series_csv(s);
    CHECK(csv.rfind("index,S_n,mode,condition_flag,S_n_exact\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    auto d = birkhoff_S(a, Rational(1, 7), 5, Mode::Double);
    CHECK(sum_series_csv(d).rfind("index,S_n,mode,condition_flag\n", 0) == 0);
}

TEST_CASE("svg output is deterministic")
{
    PlotSeries p{"s", {1, 2, 3}, {1, 4, 9}};
    std::string a = svg_line_plot({p}, "t", "x", "y");
    CHECK(a == svg_line_plot({p}, "t", "x", "y"));
    CHECK(a.find("<svg") != std::string::npos);
    std::string b = svg_scatter({0.1, 0.2}, {0.3, 0.4}, "sc");
    CHECK(b == svg_scatter({0.1, 0.2}, {0.3, 0.4}, "sc"));
}

}
