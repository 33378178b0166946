#include "toruslab/cf_core.hpp"

#include "toruslab/error.hpp"

#include <cmath>

namespace toruslab {

struct Angle::Impl {
    std::vector<Integer> quotients;
    std::vector<ConvergentRow> rows;
    ConvergentTable table;
    Rational value;
    ConvergentRow before;  // the n = -1 row
    double hi = 0.0;
    double lo = 0.0;
};

Angle Angle::from_quotients(std::vector<Integer> quotients)
{
    if (quotients.size() < 3)
        throw Error(ErrorKind::EmptyQuotients,
                    "need at least 3 partial quotients, got " + std::to_string(quotients.size()));
    if (sgn(quotients[0]) < 0)
        throw Error(ErrorKind::NonPositiveQuotient, "a_0 must be >= 0");
    for (std::size_t i = 1; i < quotients.size(); ++i)
        if (sgn(quotients[i]) <= 0)
            throw Error(ErrorKind::NonPositiveQuotient,
                        "a_" + std::to_string(i) + " must be >= 1");

    auto impl = std::make_shared<Impl>();
    impl->quotients = std::move(quotients);
    const auto& a = impl->quotients;
    const std::size_t N = a.size() - 1;

    std::vector<Integer> p(N + 1), q(N + 1);
    Integer p_prev = 1, q_prev = 0;
    Integer p_cur = a[0], q_cur = 1;
    p[0] = p_cur;
    q[0] = q_cur;
    for (std::size_t n = 1; n <= N; ++n) {
        Integer pn = a[n] * p_cur + p_prev;
        Integer qn = a[n] * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = pn;
        q_cur = qn;
        p[n] = pn;
        q[n] = qn;
    }
    impl->value = Rational(p[N], q[N]);
    impl->value.canonicalize();

    impl->rows.resize(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        auto& r = impl->rows[n];
        r.p = p[n];
        r.q = q[n];
        r.rho = q[n] * impl->value - p[n];
        r.lambda = abs(r.rho);
    }
    impl->before.p = 1;
    impl->before.q = 0;
    impl->before.rho = -1;
    impl->before.lambda = 1;
    impl->table.rows = impl->rows;

    impl->hi = to_double(impl->value);
    impl->lo = to_double(impl->value - exact_rational(impl->hi));

    Angle out;
    out.impl_ = std::move(impl);
    return out;
}

Angle Angle::from_quotients(const std::vector<std::int64_t>& quotients)
{
    std::vector<Integer> v;
    v.reserve(quotients.size());
    for (auto x : quotients)
        v.push_back(to_integer(x));
    return from_quotients(std::move(v));
}

const std::vector<Integer>& Angle::quotients() const { return impl_->quotients; }

const Integer& Angle::a(int n) const
{
    if (n < 0 || n > depth())
        throw Error(ErrorKind::LevelBeyondHorizon,
                    "partial quotient a_" + std::to_string(n) + " not in prefix");
    return impl_->quotients[static_cast<std::size_t>(n)];
}

const Rational& Angle::value() const { return impl_->value; }
int Angle::depth() const { return static_cast<int>(impl_->quotients.size()) - 1; }
int Angle::horizon() const { return depth() - 2; }

void Angle::require_level(int n, const char* what, int lo) const
{
    if (n < lo || n > horizon())
        throw Error(ErrorKind::LevelBeyondHorizon,
                    std::string(what) + " " + std::to_string(n) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(horizon()) + "]");
}

namespace {

const ConvergentRow& row_of(const std::vector<ConvergentRow>& rows, const ConvergentRow& before,
                            int n)
{
    if (n == -1)
        return before;
    if (n < -1 || n >= static_cast<int>(rows.size()))
        throw Error(ErrorKind::LevelBeyondHorizon,
                    "convergent index " + std::to_string(n) + " not in table");
    return rows[static_cast<std::size_t>(n)];
}

}  // namespace

const Integer& Angle::q(int n) const { return row_of(impl_->rows, impl_->before, n).q; }
const Integer& Angle::p(int n) const { return row_of(impl_->rows, impl_->before, n).p; }
const Rational& Angle::rho(int n) const { return row_of(impl_->rows, impl_->before, n).rho; }
const Rational& Angle::lambda(int n) const { return row_of(impl_->rows, impl_->before, n).lambda; }
const ConvergentTable& Angle::table() const { return impl_->table; }
double Angle::alpha_hi() const { return impl_->hi; }
double Angle::alpha_lo() const { return impl_->lo; }

ConvergentTable convergents(const Angle& angle)
{
    return angle.table();
}

std::vector<Integer> expand_cf(const Rational& value, int depth)
{
    if (sgn(value) < 0 || value >= 1)
        throw Error(ErrorKind::RangeError, "expand_cf expects 0 <= value < 1");
    if (depth < 1)
        throw Error(ErrorKind::InvalidArgument, "expand_cf depth must be >= 1");
    std::vector<Integer> out{Integer(0)};
    Rational x = value;
    while (sgn(x) != 0 && static_cast<int>(out.size()) <= depth) {
        x = 1 / x;
        Integer a = floor_of(x);
        out.push_back(a);
        x -= a;
    }
    // Euclid never ends on a 1 for values in (0,1), so the output is canonical.
    return out;
}

Beta0Partial beta0_partial(const Angle& angle, int N)
{
    angle.require_level(N, "beta0 level");
    Rational s = 0;
    for (int n = 0; n <= N; ++n)
        s += angle.rho(n);
    return {frac(s), angle.lambda(N + 1)};
}

std::vector<Integer> ell_sequence(const Angle& angle, int N)
{
    angle.require_level(N, "ell level");
    std::vector<Integer> ell;
    Integer s = 0;
    for (int n = 0; n <= N; ++n) {
        s += angle.q(n);
        ell.push_back(s);
        if (!(s < angle.q(n) + angle.q(n + 1)))
            throw Error(ErrorKind::InvariantBroken,
                        "l_" + std::to_string(n) + " >= q_n + q_{n+1}");
        if (angle.a(n + 1) >= 2 && !(s < angle.q(n + 1)))
            throw Error(ErrorKind::InvariantBroken,
                        "l_" + std::to_string(n) + " >= q_{n+1} although a_{n+1} >= 2");
    }
    return ell;
}

OrbitMargin not_on_orbit_margin(const Angle& angle, const Rational& beta, std::int64_t K)
{
    if (K < 1)
        throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
    // The separation argument needs a level n <= horizon with q_n > K.
    if (!(angle.q(angle.horizon()) > K))
        throw Error(ErrorKind::LevelBeyondHorizon,
                    "q_horizon = " + angle.q(angle.horizon()).get_str() + " does not exceed K = " +
                        std::to_string(K));
    const Rational& alpha = angle.value();
    OrbitMargin best{circle_norm(beta), 0};
    for (std::int64_t k = 1; k <= K; ++k) {
        for (int s : {1, -1}) {
            Rational d = circle_norm(Rational(to_integer(s * k)) * alpha - beta);
            if (d < best.margin) {
                best.margin = d;
                best.argmin = s * k;
            }
        }
    }
    return best;
}

std::vector<std::string> check_convergent_identities(const Angle& angle)
{
    std::vector<std::string> bad;
    const int H = angle.horizon();
    const Rational& alpha = angle.value();
    auto fail = [&](const std::string& what, int n) {
        bad.push_back(what + " at n=" + std::to_string(n));
    };

    for (int n = 0; n <= H; ++n) {
        if (angle.q(n + 1) != angle.a(n + 1) * angle.q(n) + angle.q(n - 1))
            fail("q recurrence", n);
        if (angle.p(n + 1) != angle.a(n + 1) * angle.p(n) + angle.p(n - 1))
            fail("p recurrence", n);
        Rational signed_lambda = (n % 2 == 0) ? angle.rho(n) : Rational(-angle.rho(n));
        if (signed_lambda != angle.lambda(n) || angle.rho(n) != angle.q(n) * alpha - angle.p(n))
            fail("lambda = (-1)^n rho", n);
        if (angle.lambda(n - 1) != angle.a(n + 1) * angle.lambda(n) + angle.lambda(n + 1))
            fail("lambda^{(n-1)} = a_{n+1} lambda^{(n)} + lambda^{(n+1)}", n);
        if (n >= 1) {
            Rational ratio = angle.lambda(n - 2) / angle.lambda(n - 1);
            if (ratio < angle.a(n) || !(ratio < angle.a(n) + 1))
                fail("lambda^{(n-2)}/lambda^{(n-1)} in [a_n, a_n + 1)", n);
        }
        if (n < H) {
            Rational lo(Integer(1), angle.q(n + 1) + angle.q(n));
            Rational hi(Integer(1), angle.q(n + 1));
            if (!(lo < angle.lambda(n) && angle.lambda(n) < hi))
                fail("1/(q_{n+1}+q_n) < lambda^{(n)} < 1/q_{n+1}", n);
            // min_{0<j<q_{n+1}} ||j alpha|| = lambda^{(n)}: (q_n, rho_n), (q_{n+1}, rho_{n+1})
            // is a unimodular basis of {(j, j alpha - k)} with rho of opposite signs, so any
            // j in (0, q_{n+1}) has |j alpha - k| >= lambda^{(n)}, attained at j = q_n.
            Integer det = angle.q(n) * angle.p(n + 1) - angle.q(n + 1) * angle.p(n);
            bool unimodular = det == 1 || det == -1;
            bool opposite = sgn(angle.rho(n)) * sgn(angle.rho(n + 1)) < 0;
            bool attained = circle_norm(angle.q(n) * alpha) == angle.lambda(n);
            // With a_1 = 1 the range 0 < j < q_1 is empty at n = 0 and lambda^{(0)} = alpha > 1/2.
            bool vacuous = n == 0 && angle.q(0) == angle.q(1);
            bool below = angle.q(n) < angle.q(n + 1);
            if (!vacuous && !(unimodular && opposite && attained && below))
                fail("lambda^{(n)} = min_{0<j<q_{n+1}} ||j alpha||", n);
        }
    }
    return bad;
}

}  // namespace toruslab
