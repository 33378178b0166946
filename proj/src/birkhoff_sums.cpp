#include "toruslab/birkhoff_sums.hpp"

#include "toruslab/error.hpp"

#include <cmath>

namespace toruslab {

namespace {

constexpr std::int64_t kMaxExactPrefix = 20'000;
constexpr double kConditionThreshold = 1e12;

Integer lcm_of(const Integer& a, const Integer& b)
{
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

void split_sum(const Integer* v, std::size_t n, Integer& num, Integer& den)
{
    if (n == 1) {
        num = 1;
        den = v[0];
        return;
    }
    if (n == 2) {
        num = v[0] + v[1];
        den = v[0] * v[1];
        return;
    }
    std::size_t h = n / 2;
    Integer n1, d1, n2, d2;
    split_sum(v, h, n1, d1);
    split_sum(v + h, n - h, n2, d2);
    num = n1 * d2 + n2 * d1;
    den = d1 * d2;
}

}  // namespace

const char* to_string(Mode mode)
{
    return mode == Mode::Exact ? "exact" : "double";
}

Mode parse_mode(const std::string& text)
{
    if (text == "exact")
        return Mode::Exact;
    if (text == "double")
        return Mode::Double;
    throw Error(ErrorKind::InvalidArgument, "mode must be exact or double");
}

PsiTriple psi_eval(const Rational& y)
{
    Rational f = frac(y);
    if (sgn(f) == 0)
        throw Error(ErrorKind::PoleAtZero, "psi evaluated at 0");
    PsiTriple t;
    t.psi1 = 1 / f;
    t.psi2 = 1 / (1 - f);
    t.psi = t.psi1 > t.psi2 ? t.psi1 : t.psi2;
    return t;
}

ExactOrbit::ExactOrbit(const Angle& angle, const Rational& x)
{
    Rational fx = frac(x);
    Rational fa = frac(angle.value());
    D_ = lcm_of(fx.get_den(), fa.get_den());
    x_num_ = fx.get_num() * (D_ / fx.get_den());
    step_ = fa.get_num() * (D_ / fa.get_den());
}

Integer ExactOrbit::numerator_at(std::int64_t i) const
{
    Integer u = x_num_ + step_ * to_integer(i);
    mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), D_.get_mpz_t());
    return u;
}

Rational ExactOrbit::point_at(std::int64_t i) const
{
    Rational r(numerator_at(i), D_);
    r.canonicalize();
    return r;
}

std::vector<Integer> ExactOrbit::scaled_norms(std::int64_t i0, std::int64_t i1) const
{
    std::vector<Integer> out;
    if (i1 <= i0)
        return out;
    out.reserve(static_cast<std::size_t>(i1 - i0));
    Integer u = numerator_at(i0);
    Integer w;
    for (std::int64_t i = i0; i < i1; ++i) {
        if (sgn(u) == 0)
            throw Error(ErrorKind::OrbitHitsPole, "orbit point equals 0", i);
        w = D_ - u;
        out.push_back(u < w ? u : w);
        u += step_;
        if (u >= D_)
            u -= D_;
    }
    return out;
}

Rational sum_of_reciprocals(const std::vector<Integer>& v)
{
    if (v.empty())
        return 0;
    Integer num, den;
    split_sum(v.data(), v.size(), num, den);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational birkhoff_sum_range(const Angle& angle, const Rational& x, std::int64_t i0, std::int64_t i1)
{
    ExactOrbit orb(angle, x);
    Rational s = sum_of_reciprocals(orb.scaled_norms(i0, i1));
    return s * orb.denominator();
}

Rational birkhoff_sum(const Angle& angle, const Rational& x, std::int64_t n)
{
    if (n < 0)
        throw Error(ErrorKind::InvalidArgument, "negative sum length");
    return birkhoff_sum_range(angle, x, 0, n);
}

FastOrbit::FastOrbit(const Angle& angle, const Rational& x)
{
    Rational fa = frac(angle.value());
    a_hi_ = to_double(fa);
    a_lo_ = to_double(fa - exact_rational(a_hi_));
    Rational fx = frac(x);
    x_hi_ = to_double(fx);
    x_lo_ = to_double(fx - exact_rational(x_hi_));
}

double FastOrbit::position(std::int64_t i) const
{
    double di = static_cast<double>(i);
    double p = di * a_hi_;
    double e = std::fma(di, a_hi_, -p);
    double f = p - std::floor(p);
    double r = f + x_hi_;
    r -= std::floor(r);
    r += (e + di * a_lo_) + x_lo_;
    return r - std::floor(r);
}

double FastOrbit::norm(std::int64_t i) const
{
    double r = position(i);
    return r < 0.5 ? r : 1.0 - r;
}

DoubleSum birkhoff_sum_double(const Angle& angle, const Rational& x, std::int64_t n,
                              std::int64_t start)
{
    FastOrbit orb(angle, x);
    DoubleSum out;
    double sum = 0.0, comp = 0.0;
    for (std::int64_t i = start; i < start + n; ++i) {
        double d = orb.norm(i);
        if (d == 0.0)
            throw Error(ErrorKind::OrbitHitsPole, "orbit point rounds to 0", i);
        double t = 1.0 / d;
        if (t > out.max_term) {
            out.max_term = t;
            out.argmax = i;
        }
        if (d < out.min_norm)
            out.min_norm = d;
        double s = sum + t;
        comp += std::fabs(sum) >= t ? (sum - s) + t : (t - s) + sum;
        sum = s;
    }
    out.value = sum + comp;
    out.condition_flag = out.max_term > kConditionThreshold;
    double pos_err = FastOrbit::kPositionError;
    out.rel_error_bound = out.min_norm > pos_err ? pos_err / (out.min_norm - pos_err) + 4e-16 : 1.0;
    return out;
}

SumSeries birkhoff_S(const Angle& angle, const Rational& x, std::int64_t n, Mode mode)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "series length must be >= 1");
    SumSeries s;
    s.x = frac(x);
    s.mode = mode;
    s.approx.reserve(static_cast<std::size_t>(n));
    if (mode == Mode::Exact) {
        if (n > kMaxExactPrefix)
            throw Error(ErrorKind::RangeError,
                        "exact prefix series limited to " + std::to_string(kMaxExactPrefix) +
                            " terms; use double mode");
        ExactOrbit orb(angle, x);
        std::vector<Integer> norms = orb.scaled_norms(0, n);
        Rational acc = 0;
        s.exact.reserve(static_cast<std::size_t>(n));
        for (const auto& m : norms) {
            acc += ratio(orb.denominator(), m);
            s.exact.push_back(acc);
            s.approx.push_back(to_double(acc));
        }
        return s;
    }
    FastOrbit orb(angle, x);
    double sum = 0.0, comp = 0.0, min_norm = 1.0;
    for (std::int64_t i = 0; i < n; ++i) {
        double d = orb.norm(i);
        if (d == 0.0)
            throw Error(ErrorKind::OrbitHitsPole, "orbit point rounds to 0", i);
        double t = 1.0 / d;
        if (t > kConditionThreshold)
            s.condition_flag = true;
        if (d < min_norm)
            min_norm = d;
        double nxt = sum + t;
        comp += std::fabs(sum) >= t ? (sum - nxt) + t : (t - nxt) + sum;
        sum = nxt;
        s.approx.push_back(sum + comp);
    }
    double pos_err = FastOrbit::kPositionError;
    s.rel_error_bound = min_norm > pos_err ? pos_err / (min_norm - pos_err) + 4e-16 : 1.0;
    return s;
}

Rational theta(const Angle& angle, const Rational& x, const Rational& beta, std::int64_t n)
{
    return birkhoff_sum(angle, x, n) / birkhoff_sum(angle, x - beta, n);
}

double theta_double(const Angle& angle, const Rational& x, const Rational& beta, std::int64_t n)
{
    return birkhoff_sum_double(angle, x, n).value / birkhoff_sum_double(angle, x - beta, n).value;
}

Rational j_involution(const Angle& angle, std::int64_t n, const Rational& beta, const Rational& x)
{
    return frac(beta - Rational(to_integer(n - 1)) * angle.value() - x);
}

}  // namespace toruslab
