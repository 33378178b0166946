#pragma once

#include "toruslab/cf_core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace toruslab {

struct OrbitSegment {
    Rational base;
    std::int64_t length = 0;
    std::vector<Rational> points;  // R^i(base), i < length, each in [0,1)
};

OrbitSegment orbit(const Angle& angle, const Rational& x, std::int64_t k);

struct GapStats {
    Rational min_gap;
    Rational max_gap;
    std::optional<int> level;   // n with length == q_n, if any
    bool identities_checked = false;
};

// Consecutive spacings of the segment on the circle. When the segment starts at 0 and
// has length q_n (n >= 1, n <= horizon) the three-distance identities are asserted;
// otherwise the raw gaps come back with identities_checked == false.
GapStats gap_stats(const Angle& angle, const OrbitSegment& segment);

struct OrbitDecomposition {
    std::int64_t ell = 0;
    std::int64_t r = 0;
    bool holds = false;
};

OrbitDecomposition orbit_decomposition(const Angle& angle, std::int64_t m, int n);

// Half-open arc [start, start + length) on the circle, start in [0,1).
struct Arc {
    Rational start;
    Rational length;
    bool contains(const Rational& x) const;
};

struct RenormLevel {
    int n = 0;
    Arc delta_n;    // [0, {q_n alpha}) for even n, [{q_n alpha}, 1) for odd n
    Arc delta_n1;   // same rule at level n + 1
    Integer large_floors;  // q_{n+1}
    Integer small_floors;  // q_n
};

RenormLevel renorm_level(const Angle& angle, int n);

// Checks that the q_{n+1} translates of delta_n and the q_n translates of delta_n1
// tile [0,1) exactly.
bool verify_partition(const Angle& angle, const RenormLevel& level);

enum class Tower { Large, Small };

struct TowerAddress {
    Tower tower = Tower::Large;
    std::int64_t floor = 0;
    Rational base_point;  // x^{(n)} = R^{-floor}(x), inside the tower's base
};

TowerAddress tower_address(const Angle& angle, const Rational& x, int n);

struct ReturnRecord {
    Rational sample;
    std::int64_t return_time = 0;
    std::int64_t expected_time = 0;
    Rational returned;
    bool time_ok = false;
    bool rotation_ok = false;   // returned == sample + (-1)^n lambda^{(n)} on the renormalized circle
};

std::vector<ReturnRecord> first_return_check(const Angle& angle, int n,
                                             const std::vector<Rational>& samples);

// sigma(k) = nearest multiple of 1/q_n to k alpha; requires a_{n+1} >= 2.
std::vector<std::int64_t> near_rational_bijection(const Angle& angle, int n);

}  // namespace toruslab
