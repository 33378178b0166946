#pragma once

#include "toruslab/rational.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace toruslab {

struct ConvergentRow {
    Integer p;
    Integer q;
    Rational rho;     // q_n * alpha - p_n, signed
    Rational lambda;  // |rho_n|
};

struct ConvergentTable {
    std::vector<ConvergentRow> rows;  // n = 0..N
};

// An angle given by the finite continued fraction [a_0; a_1, ..., a_N].
// Level-indexed statements are only meaningful up to horizon() = N - 2,
// where the prefix's convergents agree with those of every extension.
class Angle {
public:
    static Angle from_quotients(std::vector<Integer> quotients);
    static Angle from_quotients(const std::vector<std::int64_t>& quotients);

    const std::vector<Integer>& quotients() const;
    const Integer& a(int n) const;
    const Rational& value() const;
    int depth() const;
    int horizon() const;
    // Throws LevelBeyondHorizon when n is outside [lo, horizon()].
    void require_level(int n, const char* what = "level", int lo = 0) const;

    // Indices run from -1 with q_{-1} = 0, p_{-1} = 1, rho_{-1} = -1.
    const Integer& q(int n) const;
    const Integer& p(int n) const;
    const Rational& rho(int n) const;
    const Rational& lambda(int n) const;
    const ConvergentTable& table() const;

    // value() == alpha_hi() + alpha_lo() up to about 2^-106.
    double alpha_hi() const;
    double alpha_lo() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

ConvergentTable convergents(const Angle& angle);

// Partial quotients of 0 <= value < 1 (a_0 = 0), at most depth + 1 entries.
std::vector<Integer> expand_cf(const Rational& value, int depth);

struct Beta0Partial {
    Rational value;       // sum_{n <= N} rho_n mod 1
    Rational tail_bound;  // lambda^{(N+1)}
};

Beta0Partial beta0_partial(const Angle& angle, int N);

// l_n = q_0 + ... + q_n for n = 0..N, with both size bounds checked.
std::vector<Integer> ell_sequence(const Angle& angle, int N);

struct OrbitMargin {
    Rational margin;       // min over |k| <= K of ||k alpha - beta||
    std::int64_t argmin;   // a k attaining it, smallest |k|, positive first
};

OrbitMargin not_on_orbit_margin(const Angle& angle, const Rational& beta, std::int64_t K);

// Exhaustive check of the convergent identities through the horizon.
// Returns a list of violated identities; empty means everything holds.
std::vector<std::string> check_convergent_identities(const Angle& angle);

}  // namespace toruslab
