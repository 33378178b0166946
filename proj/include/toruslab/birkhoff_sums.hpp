#pragma once

#include "toruslab/cf_core.hpp"

#include <cstdint>
#include <vector>

namespace toruslab {

enum class Mode { Exact, Double };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct PsiTriple {
    Rational psi1;  // 1/y
    Rational psi2;  // 1/(1-y)
    Rational psi;   // max of the two, = 1/||y||
};

PsiTriple psi_eval(const Rational& y);

// Positions x + i*alpha of an exact orbit, scaled to a common integer denominator D,
// so that x + i*alpha = u_i / D (mod 1) with u_i in [0, D).
class ExactOrbit {
public:
    ExactOrbit(const Angle& angle, const Rational& x);

    const Integer& denominator() const { return D_; }
    Integer numerator_at(std::int64_t i) const;
    Rational point_at(std::int64_t i) const;

    // D * ||x + i alpha|| for i in [i0, i1), in order.
    std::vector<Integer> scaled_norms(std::int64_t i0, std::int64_t i1) const;

private:
    Integer D_;
    Integer x_num_;
    Integer step_;
};

// Double-double evaluation of ||x + i alpha||, absolute error below kPositionError.
class FastOrbit {
public:
    static constexpr double kPositionError = 1e-15;

    FastOrbit(const Angle& angle, const Rational& x);

    double position(std::int64_t i) const;
    double norm(std::int64_t i) const;

private:
    double a_hi_, a_lo_, x_hi_, x_lo_;
};

// Exact S_n(x) = sum_{i<n} 1/||x + i alpha||. Throws OrbitHitsPole(i).
Rational birkhoff_sum(const Angle& angle, const Rational& x, std::int64_t n);
// Exact sum over i in [i0, i1).
Rational birkhoff_sum_range(const Angle& angle, const Rational& x, std::int64_t i0, std::int64_t i1);
// Exact sum of 1/v_i for positive integers, by binary splitting.
Rational sum_of_reciprocals(const std::vector<Integer>& v);

struct DoubleSum {
    double value = 0.0;
    double rel_error_bound = 0.0;
    bool condition_flag = false;   // some term exceeded 1e12
    double max_term = 0.0;
    std::int64_t argmax = -1;
    double min_norm = 1.0;
};

DoubleSum birkhoff_sum_double(const Angle& angle, const Rational& x, std::int64_t n,
                              std::int64_t start = 0);

struct SumSeries {
    Rational x;
    Mode mode = Mode::Exact;
    std::vector<Rational> exact;   // exact[k] = S_{k+1}(x), exact mode
    std::vector<double> approx;    // approx[k] = S_{k+1}(x), both modes
    bool condition_flag = false;
    double rel_error_bound = 0.0;

    std::size_t size() const { return approx.size(); }
};

SumSeries birkhoff_S(const Angle& angle, const Rational& x, std::int64_t n, Mode mode);

// Theta_n^beta(x) = S_n(x) / S_n(x - beta).
Rational theta(const Angle& angle, const Rational& x, const Rational& beta, std::int64_t n);
double theta_double(const Angle& angle, const Rational& x, const Rational& beta, std::int64_t n);

// J_n^beta(x) = beta - (n-1) alpha - x mod 1.
Rational j_involution(const Angle& angle, std::int64_t n, const Rational& beta, const Rational& x);

}  // namespace toruslab
