#pragma once

#include "toruslab/cf_core.hpp"
#include "toruslab/flow_dynamics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toruslab {

struct Witness {
    int n = 0;
    bool holds = true;
    std::string lhs;
    std::string rhs;
};

// Finite-depth evidence for a property that asks for infinitely many levels.
struct RegimeCertificate {
    std::string kind;
    std::vector<Witness> witnesses;  // only levels where the inequality holds, unless noted
    int depth = 0;
    std::string verdict_strength = "consistent-with";
    std::vector<std::string> notes;
};

// a_{n+1} >= q_n^nu and gcd(q_n, k) = 1, on levels with q_n >= 2.
RegimeCertificate w_membership(const Angle& angle, double nu, std::int64_t k, int depth);

// Smallest-effort i >= 1 with gcd(a + i b, c) = 1, given gcd(a, b) = 1.
Integer pqk_index(const Integer& a, const Integer& b, const Integer& c);

// ceil(q^nu), exact when nu is a ratio of small integers.
Integer ceil_power(const Integer& q, double nu);
// a >= q^nu, decided exactly for such nu.
bool power_at_least(const Integer& a, const Integer& q, double nu);

Angle construct_w_angle(double nu, std::int64_t k, const std::vector<Integer>& seed_prefix,
                        int levels);

// a_{n+1} > q_n^k.
RegimeCertificate liouville_witnesses(const Angle& angle, int k, int depth);

// Partial sums of 1/log q_n over levels 1..depth with a_n, a_{n+1} >= 2 (index = level).
std::vector<long double> khinchin_levy_partial(const Angle& angle, int depth);

// Per-level q_n >= C exp(n^{2+gamma}); every level is listed with its outcome.
RegimeCertificate growth_check(const Angle& angle, double C, double gamma, int depth);

Angle construct_rapid_growth_angle(double C, double gamma, int levels,
                                   const std::vector<Integer>& seed_prefix = {Integer(0)});

struct InvLogSums {
    std::vector<long double> partial;  // index = level, starting at level 1
    std::vector<int> flagged;          // levels with a_n = 1
    bool divergent = false;
};

InvLogSums sum_inv_log_a(const Angle& angle, int depth);

// Smallest |j| <= K (positive first) with q0 = p0 + j alpha mod 1.
std::optional<std::int64_t> same_orbit_detect(const Angle& angle, const Rational& p0,
                                              const Rational& q0, std::int64_t K);

// beta = b/q_n + 1/(2 q_n).
Rational generic_beta(const Angle& angle, int n, const Integer& b);

enum class Regime { Historic, ExtremeHistoric, PhysicalMeasure, NoTheorem };

const char* to_string(Regime regime);

struct VerdictOptions {
    double growth_C = 1e-3;
    double growth_gamma = 0.5;
    double nu = 1.0;
    int liouville_k = 2;
    std::int64_t orbit_horizon = 1000;
    bool strict = false;  // throw ConflictingCertificates instead of listing them
};

struct RegimeVerdict {
    Regime regime = Regime::NoTheorem;
    std::string predicted_pomega;
    std::string basis;
    std::vector<RegimeCertificate> certificates;
    std::vector<std::string> conflicts;
    int depth = 0;
    std::string verdict_strength = "consistent-with";
};

RegimeVerdict regime_verdict(const Angle& angle, const FlowParams& params, int depth,
                             const VerdictOptions& options = {});

}  // namespace toruslab
