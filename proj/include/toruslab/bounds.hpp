#pragma once

#include "toruslab/birkhoff_sums.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toruslab {

// Sums with at most this many terms are evaluated exactly when no mode is forced.
constexpr std::int64_t kExactTermLimit = 10'000;

// Outcome of comparing a computed quantity against a stated bound.
struct BoundCheck {
    std::string lemma;
    bool holds = false;
    // False when the two sides were too close to separate at the working precision;
    // such a check never counts as holding.
    bool decisive = true;
    Mode mode = Mode::Exact;
    bool condition_flag = false;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string lhs_text;
    std::string rhs_text;
    // Relative margin in favour of the inequality; negative when it fails.
    double slack = 0.0;
};

enum class Relation { Less, LessEqual, Greater, GreaterEqual };

// lhs REL rhs for an exact left side and a real right side.
BoundCheck compare_exact(const std::string& lemma, const Rational& lhs, Relation rel,
                         long double rhs);
// Both sides exact.
BoundCheck compare_exact(const std::string& lemma, const Rational& lhs, Relation rel,
                         const Rational& rhs);
// Double-mode left side with a relative error bound.
BoundCheck compare_double(const std::string& lemma, double lhs, double lhs_rel_error,
                          bool condition_flag, Relation rel, long double rhs);

struct SectorReport {
    int n = 0;
    Mode mode = Mode::Exact;
    double S = 0.0;
    std::optional<Rational> S_exact;
    Rational y0;          // orbit point closest to 0
    std::int64_t y0_index = 0;
    BoundCheck lower;
    BoundCheck upper;
};

SectorReport sector_sum_bounds(const Angle& angle, const Rational& y, int n,
                               std::optional<Mode> mode = {});

BoundCheck kq_lower_bound_check(const Angle& angle, const Rational& x, int n, std::int64_t k,
                                std::optional<Mode> mode = {});

BoundCheck close_return_dominance(const Angle& angle, const Rational& x, std::int64_t i, int n,
                                  const Rational& epsilon, std::optional<Mode> mode = {});

struct LipschitzReport {
    BoundCheck psi1;
    BoundCheck psi2;
    std::int64_t j0 = 0;  // argmax of psi1 along the x-orbit
    std::int64_t j1 = 0;  // argmax of psi1 along the y-orbit
};

LipschitzReport lipschitz_transfer(const Angle& angle, const Rational& x, const Rational& y, int n);

// points[k-1] = x_k for k = 1..q-1. delta = 0 demands x_k = k/q exactly.
BoundCheck rational_shadow_sum_bound(std::int64_t q, const Rational& delta,
                                     const std::vector<Rational>& points);

BoundCheck offgrid_sum_bound(std::int64_t q, const Rational& A, const Rational& beta);

struct MarginReport {
    Rational margin;  // min_n ||n/q - a/b||
    Rational bound;   // 1/(bq)
    bool holds = false;
};

MarginReport smallest_distance_margin(const Integer& a, const Integer& b, const Integer& q);

BoundCheck abc_upper_bound(const Angle& angle, int n, std::int64_t ell, const Rational& beta,
                           const Rational& A, const Rational& B, const Rational& x,
                           std::optional<Mode> mode = {});

BoundCheck ground_floor_lower_bound(const Angle& angle, int n, std::int64_t ell, const Rational& x,
                                    bool widened, std::optional<Mode> mode = {});

// Smallest C with sum_{k=2}^{a} 1/log k <= C a / log a for all 2 <= a <= a_max.
struct HarmonicConstant {
    double smallest_C = 0.0;
    std::int64_t attained_at = 2;
    bool holds_with_3 = false;
};

HarmonicConstant harmonic_log_constant(std::int64_t a_max);

}  // namespace toruslab
