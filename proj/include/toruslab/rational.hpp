#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace toruslab {

using Integer = mpz_class;
using Rational = mpq_class;

// num/den in canonical form; den must be nonzero.
Rational ratio(const Integer& num, const Integer& den);

Integer floor_of(const Rational& x);
Integer ceil_of(const Rational& x);
// Representative in [0,1).
Rational frac(const Rational& x);
// Distance to the nearest integer.
Rational circle_norm(const Rational& x);

Integer to_integer(std::int64_t v);
std::int64_t to_int64(const Integer& v);
bool fits_int64(const Integer& v);

double to_double(const Rational& x);
double to_double(const Integer& x);
long double to_long_double(const Rational& x);
// Natural log of a positive integer, accurate for values far beyond double range.
long double log_of(const Integer& x);
long double log_of(const Rational& x);
// Exact value of a finite double.
Rational exact_rational(double x);

// Decimal rendering with `digits` significant digits, correctly rounded.
std::string to_decimal(const Rational& x, int digits = 18);
std::string to_fraction(const Rational& x);

// Accepts "p/q", integers, and decimal literals with optional exponent.
Rational parse_rational(std::string_view text);

// A point of the circle R/Z: exact representative in [0,1) plus a double shadow.
struct CirclePoint {
    Rational value;
    double shadow = 0.0;

    CirclePoint() = default;
    explicit CirclePoint(const Rational& x);

    // The double shadow is unusable when the point sits within 1e-12 of 0.
    bool shadow_reliable() const;
    Rational norm() const { return circle_norm(value); }
};

}  // namespace toruslab
