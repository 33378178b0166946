#include "toruslab/rational.hpp"

#include "toruslab/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace toruslab {

namespace {

const char* kind_names[] = {
    "EmptyQuotients",
    "NonPositiveQuotient",
    "LevelBeyondHorizon",
    "RangeError",
    "LengthNotConvergentDenominator",
    "SampleOutsideDomain",
    "HypothesisViolated",
    "PoleAtZero",
    "OrbitHitsPole",
    "PoleAtCusp",
    "OrbitHitsCusp",
    "NotPositiveDefinite",
    "NonPositiveDeterminant",
    "SectionThroughStoppingPoint",
    "LevelBudgetExceeded",
    "EmptySeries",
    "UnknownLemmaTag",
    "ConflictingCertificates",
    "InvalidArgument",
    "Stagnation",
    "InvariantBroken",
};

std::string describe(ErrorKind kind, const std::string& detail, std::int64_t index)
{
    std::string s = to_string(kind);
    if (index >= 0)
        s += "(" + std::to_string(index) + ")";
    if (!detail.empty())
        s += ": " + detail;
    return s;
}

Integer pow10(long e)
{
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
    return r;
}

// 10^e as a rational, e may be negative.
Rational pow10q(long e)
{
    if (e >= 0)
        return Rational(pow10(e));
    return Rational(Integer(1), pow10(-e));
}

}  // namespace

const char* to_string(ErrorKind kind)
{
    return kind_names[static_cast<int>(kind)];
}

Error::Error(ErrorKind kind, std::string detail, std::int64_t index)
    : std::runtime_error(describe(kind, detail, index)),
      kind_(kind), detail_(std::move(detail)), index_(index)
{
}

void hypothesis_violated(const std::string& clause)
{
    throw Error(ErrorKind::HypothesisViolated, clause);
}

Rational ratio(const Integer& num, const Integer& den)
{
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Integer floor_of(const Rational& x)
{
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Integer ceil_of(const Rational& x)
{
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return r;
}

Rational frac(const Rational& x)
{
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(r, x.get_den());
}

Rational circle_norm(const Rational& x)
{
    Rational f = frac(x);
    Rational g = 1 - f;
    return f < g ? f : g;
}

Integer to_integer(std::int64_t v)
{
    Integer r;
    // mpz_set_si takes long, which is 64-bit on the platforms we build for.
    static_assert(sizeof(long) == 8, "64-bit long required");
    mpz_set_si(r.get_mpz_t(), static_cast<long>(v));
    return r;
}

bool fits_int64(const Integer& v)
{
    return mpz_fits_slong_p(v.get_mpz_t()) != 0;
}

std::int64_t to_int64(const Integer& v)
{
    if (!fits_int64(v))
        throw Error(ErrorKind::RangeError, "integer exceeds 64 bits");
    return static_cast<std::int64_t>(mpz_get_si(v.get_mpz_t()));
}

long double log_of(const Integer& x)
{
    if (sgn(x) <= 0)
        throw Error(ErrorKind::InvalidArgument, "log of non-positive integer");
    long e = 0;
    double m = mpz_get_d_2exp(&e, x.get_mpz_t());
    return std::log(static_cast<long double>(m)) +
           static_cast<long double>(e) * std::log(2.0L);
}

long double log_of(const Rational& x)
{
    return log_of(x.get_num()) - log_of(x.get_den());
}

double to_double(const Integer& x)
{
    return mpz_get_d(x.get_mpz_t());
}

long double to_long_double(const Rational& x)
{
    if (sgn(x) == 0)
        return 0.0L;
    Integer num = abs(x.get_num());
    Integer den = x.get_den();
    long bits = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
                static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
    // Scale so the truncated quotient carries about 70 significant bits.
    long shift = 70 - bits;
    if (shift >= 0)
        num <<= static_cast<mp_bitcnt_t>(shift);
    else
        den <<= static_cast<mp_bitcnt_t>(-shift);
    Integer q = num / den;
    Integer hi = q >> 32;
    Integer lo = q - (hi << 32);
    long double v = std::ldexp(static_cast<long double>(mpz_get_d(hi.get_mpz_t())), 32) +
                    static_cast<long double>(mpz_get_d(lo.get_mpz_t()));
    v = std::ldexp(v, static_cast<int>(-shift));
    return sgn(x) < 0 ? -v : v;
}

double to_double(const Rational& x)
{
    return static_cast<double>(to_long_double(x));
}

Rational exact_rational(double x)
{
    if (!std::isfinite(x))
        throw Error(ErrorKind::InvalidArgument, "non-finite double");
    Rational r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

std::string to_decimal(const Rational& x, int digits)
{
    if (sgn(x) == 0)
        return "0";
    Rational a = abs(x);
    long double est = log_of(a) / std::log(10.0L);
    long e = static_cast<long>(std::floor(est));
    while (pow10q(e) > a)
        --e;
    while (pow10q(e + 1) <= a)
        ++e;
    Rational scaled = a * pow10q(digits - 1 - e);
    Integer n = floor_of(scaled + Rational(1, 2));
    if (n == pow10(digits)) {
        n /= 10;
        ++e;
    }
    std::string mant = n.get_str();
    while (mant.size() > 1 && mant.back() == '0')
        mant.pop_back();

    std::string out = sgn(x) < 0 ? "-" : "";
    if (e >= -6 && e < digits) {
        if (e < 0) {
            out += "0.";
            out.append(static_cast<std::size_t>(-e - 1), '0');
            out += mant;
        } else {
            std::size_t int_len = static_cast<std::size_t>(e) + 1;
            if (mant.size() <= int_len) {
                out += mant;
                out.append(int_len - mant.size(), '0');
            } else {
                out += mant.substr(0, int_len);
                out += '.';
                out += mant.substr(int_len);
            }
        }
        return out;
    }
    out += mant.substr(0, 1);
    if (mant.size() > 1) {
        out += '.';
        out += mant.substr(1);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "e%+03ld", e);
    return out + buf;
}

std::string to_fraction(const Rational& x)
{
    return x.get_str();
}

Rational parse_rational(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start])))
        ++start;
    s = s.substr(start);
    if (s.empty())
        throw Error(ErrorKind::InvalidArgument, "empty number");

    if (s.find('/') != std::string::npos) {
        Rational r;
        std::string t = s[0] == '+' ? s.substr(1) : s;
        if (r.set_str(t, 10) != 0 || sgn(r.get_den()) == 0)
            throw Error(ErrorKind::InvalidArgument, "bad rational '" + s + "'");
        r.canonicalize();
        return r;
    }

    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long exp10 = 0;
    bool seen_digit = false, seen_point = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            seen_digit = true;
            if (seen_point)
                --exp10;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit)
        throw Error(ErrorKind::InvalidArgument, "bad number '" + s + "'");
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E')
            throw Error(ErrorKind::InvalidArgument, "bad number '" + s + "'");
        std::string ex = s.substr(i + 1);
        if (ex.empty())
            throw Error(ErrorKind::InvalidArgument, "bad exponent in '" + s + "'");
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(ex, &used);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "bad exponent in '" + s + "'");
        }
        if (used != ex.size())
            throw Error(ErrorKind::InvalidArgument, "bad exponent in '" + s + "'");
        exp10 += v;
    }
    Rational r(Integer(digits, 10));
    r *= pow10q(exp10);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

CirclePoint::CirclePoint(const Rational& x)
    : value(frac(x)), shadow(to_double(value))
{
}

bool CirclePoint::shadow_reliable() const
{
    return to_double(circle_norm(value)) >= 1e-12;
}

}  // namespace toruslab
