#include "toruslab/bounds.hpp"

#include "toruslab/bad_sets.hpp"
#include "toruslab/error.hpp"

#include <algorithm>
#include <cmath>

namespace toruslab {

namespace {

constexpr long double kTieBand = 1e-15L;

bool relation_holds(int cmp, Relation rel)
{
    switch (rel) {
    case Relation::Less: return cmp < 0;
    case Relation::LessEqual: return cmp <= 0;
    case Relation::Greater: return cmp > 0;
    case Relation::GreaterEqual: return cmp >= 0;
    }
    return false;
}

bool upper_kind(Relation rel)
{
    return rel == Relation::Less || rel == Relation::LessEqual;
}

double slack_of(long double lhs, long double rhs, Relation rel)
{
    long double scale = std::max(std::fabs(rhs), std::fabs(lhs));
    if (scale == 0.0L)
        return 0.0;
    long double d = upper_kind(rel) ? rhs - lhs : lhs - rhs;
    return static_cast<double>(d / (std::fabs(rhs) > 0.0L ? std::fabs(rhs) : scale));
}

std::string real_text(long double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.18Lg", v);
    return buf;
}

Mode pick_mode(std::optional<Mode> requested, std::int64_t terms)
{
    if (requested)
        return *requested;
    return terms <= kExactTermLimit ? Mode::Exact : Mode::Double;
}

std::int64_t level_count(const Integer& q)
{
    if (!fits_int64(q))
        throw Error(ErrorKind::RangeError, "q_n exceeds 64 bits");
    return to_int64(q);
}

struct Evaluated {
    Mode mode;
    Rational exact;
    double value = 0.0;
    double rel_error = 0.0;
    bool condition_flag = false;
};

Evaluated evaluate_sum(const Angle& angle, const Rational& x, std::int64_t count, Mode mode)
{
    Evaluated e;
    e.mode = mode;
    if (mode == Mode::Exact) {
        e.exact = birkhoff_sum(angle, x, count);
        e.value = to_double(e.exact);
    } else {
        DoubleSum d = birkhoff_sum_double(angle, x, count);
        e.value = d.value;
        e.rel_error = d.rel_error_bound;
        e.condition_flag = d.condition_flag;
    }
    return e;
}

BoundCheck compare_evaluated(const std::string& lemma, const Evaluated& e, Relation rel,
                             long double rhs)
{
    if (e.mode == Mode::Exact)
        return compare_exact(lemma, e.exact, rel, rhs);
    return compare_double(lemma, e.value, e.rel_error, e.condition_flag, rel, rhs);
}

}  // namespace

BoundCheck compare_exact(const std::string& lemma, const Rational& lhs, Relation rel,
                         long double rhs)
{
    BoundCheck c;
    c.lemma = lemma;
    c.mode = Mode::Exact;
    long double l = to_long_double(lhs);
    c.lhs = static_cast<double>(l);
    c.rhs = static_cast<double>(rhs);
    c.lhs_text = to_decimal(lhs);
    c.rhs_text = real_text(rhs);
    long double scale = std::max(std::fabs(l), std::fabs(rhs));
    long double diff = l - rhs;
    if (std::fabs(diff) <= kTieBand * scale) {
        c.decisive = false;
        c.holds = false;
    } else {
        c.holds = relation_holds(diff < 0 ? -1 : 1, rel);
    }
    c.slack = slack_of(l, rhs, rel);
    return c;
}

BoundCheck compare_exact(const std::string& lemma, const Rational& lhs, Relation rel,
                         const Rational& rhs)
{
    BoundCheck c;
    c.lemma = lemma;
    c.mode = Mode::Exact;
    c.lhs = to_double(lhs);
    c.rhs = to_double(rhs);
    c.lhs_text = to_decimal(lhs);
    c.rhs_text = to_decimal(rhs);
    c.holds = relation_holds(cmp(lhs, rhs), rel);
    c.slack = slack_of(to_long_double(lhs), to_long_double(rhs), rel);
    return c;
}

BoundCheck compare_double(const std::string& lemma, double lhs, double lhs_rel_error,
                          bool condition_flag, Relation rel, long double rhs)
{
    BoundCheck c;
    c.lemma = lemma;
    c.mode = Mode::Double;
    c.condition_flag = condition_flag;
    c.lhs = lhs;
    c.rhs = static_cast<double>(rhs);
    c.lhs_text = real_text(lhs);
    c.rhs_text = real_text(rhs);
    long double l = lhs;
    long double scale = std::max(std::fabs(l), std::fabs(rhs));
    long double diff = l - rhs;
    long double band = static_cast<long double>(lhs_rel_error) * std::fabs(l) + kTieBand * scale;
    if (std::fabs(diff) <= band) {
        c.decisive = false;
        c.holds = false;
    } else {
        c.holds = relation_holds(diff < 0 ? -1 : 1, rel);
    }
    c.slack = slack_of(l, rhs, rel);
    return c;
}

SectorReport sector_sum_bounds(const Angle& angle, const Rational& y, int n,
                               std::optional<Mode> mode)
{
    angle.require_level(n, "sector level");
    std::int64_t qn = level_count(angle.q(n));
    SectorReport r;
    r.n = n;
    r.mode = pick_mode(mode, qn);
    long double lam = to_long_double(angle.lambda(n - 1));
    long double logq = log_of(angle.q(n));
    long double lo_rhs = logq / (2.0L * lam);
    long double hi_rhs = 4.0L * logq / lam;
    const std::string lower = "sector lower bound";
    const std::string upper = "sector upper bound";

    if (r.mode == Mode::Exact) {
        ExactOrbit orb(angle, y);
        std::vector<Integer> norms = orb.scaled_norms(0, qn);
        auto it = std::min_element(norms.begin(), norms.end());
        r.y0_index = it - norms.begin();
        r.y0 = orb.point_at(r.y0_index);
        Rational S = sum_of_reciprocals(norms) * orb.denominator();
        Rational rest = S - ratio(orb.denominator(), *it);
        r.S_exact = S;
        r.S = to_double(S);
        if (qn == 1) {
            r.lower = compare_exact(lower, rest, Relation::GreaterEqual, Rational(0));
            r.upper = compare_exact(upper, rest, Relation::LessEqual, Rational(0));
        } else {
            r.lower = compare_exact(lower, rest, Relation::GreaterEqual, lo_rhs);
            r.upper = compare_exact(upper, rest, Relation::LessEqual, hi_rhs);
        }
        return r;
    }

    FastOrbit orb(angle, y);
    DoubleSum d = birkhoff_sum_double(angle, y, qn);
    r.S = d.value;
    r.y0_index = d.argmax;
    r.y0 = frac(y + Rational(to_integer(d.argmax)) * angle.value());
    double rest = d.value - d.max_term;
    // The subtraction can lose accuracy when the largest term dominates.
    double err = d.rel_error_bound * d.value / std::max(rest, 1e-300);
    r.lower = compare_double(lower, rest, err, d.condition_flag, Relation::GreaterEqual, lo_rhs);
    r.upper = compare_double(upper, rest, err, d.condition_flag, Relation::LessEqual, hi_rhs);
    return r;
}

BoundCheck kq_lower_bound_check(const Angle& angle, const Rational& x, int n, std::int64_t k,
                                std::optional<Mode> mode)
{
    angle.require_level(n, "kq level", 1);
    if (k < 1)
        hypothesis_violated("k>=1");
    std::int64_t count = k * level_count(angle.q(n));
    Evaluated e = evaluate_sum(angle, x, count, pick_mode(mode, count));
    long double rhs = static_cast<long double>(k) * log_of(angle.q(n)) /
                      (2.0L * to_long_double(angle.lambda(n - 1)));
    if (angle.q(n) == 1 && e.mode == Mode::Exact)
        return compare_exact("kq orbit lower bound", e.exact, Relation::Greater, Rational(0));
    return compare_evaluated("kq orbit lower bound", e, Relation::Greater, rhs);
}

BoundCheck close_return_dominance(const Angle& angle, const Rational& x, std::int64_t i, int n,
                                  const Rational& epsilon, std::optional<Mode> mode)
{
    if (n < 11)
        hypothesis_violated("n>=11");
    angle.require_level(n, "close-return level");
    if (angle.a(n + 1) < 2)
        hypothesis_violated("a_{n+1}>=2");
    if (sgn(epsilon) <= 0 || epsilon >= 1)
        hypothesis_violated("0<epsilon<1");
    if (i <= 0 || !(angle.q(n) > i))
        hypothesis_violated("0<i<q_n");
    Rational d = circle_norm(x + Rational(to_integer(i)) * angle.value());
    long double q = to_long_double(Rational(angle.q(n)));
    long double threshold = to_long_double(epsilon) / (q * std::log(3.0L * q));
    BoundCheck close = compare_exact("closeness", d, Relation::Less, threshold);
    if (!close.holds)
        hypothesis_violated(close.decisive ? "closeness" : "closeness (undecided)");
    if (sgn(d) == 0)
        throw Error(ErrorKind::OrbitHitsPole, "x + i alpha = 0", i);

    Rational rhs = 6 * epsilon / d;
    Evaluated e = evaluate_sum(angle, x, i, pick_mode(mode, i));
    if (e.mode == Mode::Exact)
        return compare_exact("close-return dominance", e.exact, Relation::Less, rhs);
    return compare_evaluated("close-return dominance", e, Relation::Less, to_long_double(rhs));
}

LipschitzReport lipschitz_transfer(const Angle& angle, const Rational& x, const Rational& y, int n)
{
    angle.require_level(n, "transfer level");
    if (circle_norm(x - y) > angle.lambda(n))
        hypothesis_violated("||x-y|| <= lambda^{(n)}");
    std::int64_t qn = level_count(angle.q(n));
    if (qn > 200'000)
        throw Error(ErrorKind::RangeError, "q_n too large for the exact transfer check");

    ExactOrbit ox(angle, x), oy(angle, y);
    std::vector<Integer> ux, uy, vx, vy;
    ux.reserve(static_cast<std::size_t>(qn));
    uy.reserve(static_cast<std::size_t>(qn));
    for (std::int64_t j = 0; j < qn; ++j) {
        Integer a = ox.numerator_at(j), b = oy.numerator_at(j);
        if (sgn(a) == 0)
            throw Error(ErrorKind::OrbitHitsPole, "x-orbit hits 0", j);
        if (sgn(b) == 0)
            throw Error(ErrorKind::OrbitHitsPole, "y-orbit hits 0", j);
        ux.push_back(a);
        uy.push_back(b);
        vx.push_back(ox.denominator() - a);
        vy.push_back(oy.denominator() - b);
    }
    Rational extra = angle.lambda(n) * angle.q(n) / angle.lambda(n - 1);

    auto one_side = [&](const std::vector<Integer>& px, const std::vector<Integer>& py,
                        const char* name, std::int64_t* j0_out, std::int64_t* j1_out) {
        // psi(R^j x) = D_x / px[j]; the maximum sits at the smallest px.
        std::int64_t j0 = std::min_element(px.begin(), px.end()) - px.begin();
        std::int64_t j1 = std::min_element(py.begin(), py.end()) - py.begin();
        Rational sx = sum_of_reciprocals(px) * ox.denominator();
        Rational sy = sum_of_reciprocals(py) * oy.denominator();
        auto gap = [&](std::int64_t j) {
            return Rational(abs(ratio(ox.denominator(), px[static_cast<std::size_t>(j)]) -
                                ratio(oy.denominator(), py[static_cast<std::size_t>(j)])));
        };
        // Both gap terms are kept as stated, also when j0 == j1.
        Rational rhs = gap(j0) + gap(j1) + extra;
        if (j0_out)
            *j0_out = j0;
        if (j1_out)
            *j1_out = j1;
        return compare_exact(name, Rational(abs(sx - sy)), Relation::LessEqual, rhs);
    };

    LipschitzReport rep;
    rep.psi1 = one_side(ux, uy, "lipschitz transfer psi1", &rep.j0, &rep.j1);
    rep.psi2 = one_side(vx, vy, "lipschitz transfer psi2", nullptr, nullptr);
    return rep;
}

BoundCheck rational_shadow_sum_bound(std::int64_t q, const Rational& delta,
                                     const std::vector<Rational>& points)
{
    if (q < 1)
        hypothesis_violated("q>=1");
    if (static_cast<std::int64_t>(points.size()) != q - 1)
        throw Error(ErrorKind::InvalidArgument, "expected q-1 points");
    Rational qq(to_integer(q));
    if (sgn(delta) < 0 || delta * qq >= 1)
        hypothesis_violated("0<delta<1/q");
    std::vector<Integer> dens;
    Rational sum = 0;
    for (std::int64_t k = 1; k < q; ++k) {
        const Rational& xk = points[static_cast<std::size_t>(k - 1)];
        Rational off = circle_norm(xk - ratio(to_integer(k), to_integer(q)));
        bool ok = sgn(delta) == 0 ? sgn(off) == 0 : off < delta;
        if (!ok)
            hypothesis_violated("||x_k - k/q|| < delta at k=" + std::to_string(k));
        sum += 1 / circle_norm(xk);
    }
    long double qd = static_cast<long double>(q);
    long double rhs = 2.0L * qd * std::log(3.0L * qd) / (1.0L - to_long_double(delta * qq));
    return compare_exact("rational shadow sum", sum, Relation::LessEqual, rhs);
}

BoundCheck offgrid_sum_bound(std::int64_t q, const Rational& A, const Rational& beta)
{
    if (q < 1)
        hypothesis_violated("q>=1");
    if (sgn(A) <= 0)
        hypothesis_violated("A>0");
    Rational qq(to_integer(q));
    // min_n ||n/q - beta|| = ||q beta|| / q
    if (!(circle_norm(qq * beta) > A))
        hypothesis_violated("||n/q - beta|| > A/q");
    std::vector<Integer> norms;
    norms.reserve(static_cast<std::size_t>(q));
    Rational b = frac(beta);
    Integer B = b.get_den() * q;
    Integer base = b.get_num() * q;  // beta = base / B
    for (std::int64_t n = 0; n < q; ++n) {
        Integer u = to_integer(n) * b.get_den() - base;
        mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), B.get_mpz_t());
        Integer w = B - u;
        norms.push_back(u < w ? u : w);
    }
    Rational sum = sum_of_reciprocals(norms) * B;
    long double a = to_long_double(A);
    long double rhs = 2.0L * static_cast<long double>(q) *
                      (1.0L / a + std::log(static_cast<long double>(q) / a));
    return compare_exact("off-grid sum", sum, Relation::Less, rhs);
}

MarginReport smallest_distance_margin(const Integer& a, const Integer& b, const Integer& q)
{
    if (b < 2)
        hypothesis_violated("b>=2");
    if (sgn(a) <= 0 || sgn(q) <= 0)
        hypothesis_violated("a,q positive");
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (g != 1)
        hypothesis_violated("gcd(a,b)=1");
    mpz_gcd(g.get_mpz_t(), b.get_mpz_t(), q.get_mpz_t());
    if (g != 1)
        hypothesis_violated("gcd(b,q)=1");
    MarginReport m;
    Integer bq = b * q;
    if (q <= 1'000'000) {
        // ||n/q - a/b|| = dist(n b - a q, bq Z) / (b q), scanned over every residue n.
        Integer best = bq;
        Integer r;
        std::int64_t qq = to_int64(q);
        for (std::int64_t n = 0; n < qq; ++n) {
            r = Integer(n) * b - a * q;
            mpz_mod(r.get_mpz_t(), r.get_mpz_t(), bq.get_mpz_t());
            if (bq - r < r)
                r = bq - r;
            if (r < best)
                best = r;
        }
        m.margin = ratio(best, bq);
    } else {
        m.margin = circle_norm(ratio(q * a, b)) / q;
    }
    m.bound = Rational(Integer(1), b * q);
    m.holds = m.margin >= m.bound;
    return m;
}

BoundCheck abc_upper_bound(const Angle& angle, int n, std::int64_t ell, const Rational& beta,
                           const Rational& A, const Rational& B, const Rational& x,
                           std::optional<Mode> mode)
{
    if (n <= 0)
        hypothesis_violated("n>0");
    angle.require_level(n, "ABC level", 1);
    if (!(sgn(B) > 0 && B < A && A < Rational(1, 2)))
        hypothesis_violated("0<B<A<1/2");
    if (ell < 1)
        hypothesis_violated("ell>=1");
    if (!(circle_norm(angle.q(n) * beta) >= A))
        hypothesis_violated("||i/q_n - beta|| >= A/q_n");
    if (!(Rational(to_integer(ell + 1)) <= B * angle.a(n + 1)))
        hypothesis_violated("ell+1 <= B a_{n+1}");
    std::int64_t count = ell * level_count(angle.q(n));
    if (!first_close_visit(angle, x, count, angle.lambda(n) / 2))
        hypothesis_violated("x in E_{n,ell}");

    Evaluated e = evaluate_sum(angle, x - beta, count, pick_mode(mode, count));
    long double q = to_long_double(Rational(angle.q(n)));
    long double a = to_long_double(A);
    long double rhs = 2.0L * static_cast<long double>(ell) * q * (1.0L / a + std::log(q / a)) /
                      (1.0L - to_long_double(B / A));
    return compare_evaluated("ABC upper bound", e, Relation::Less, rhs);
}

BoundCheck ground_floor_lower_bound(const Angle& angle, int n, std::int64_t ell, const Rational& x,
                                    bool widened, std::optional<Mode> mode)
{
    if (n <= 0)
        hypothesis_violated("n>0");
    angle.require_level(n, "ground-floor level", 1);
    if (ell < 1)
        hypothesis_violated("ell>=1");
    if (!(angle.q(n + 1) > angle.q(n) * ell))
        hypothesis_violated("ell q_n < q_{n+1}");
    std::int64_t count = ell * level_count(angle.q(n));
    Rational w = widened ? Rational(2 * angle.lambda(n)) : Rational(angle.lambda(n) / 2);
    if (!first_close_visit(angle, x, count, w))
        hypothesis_violated(widened ? "x in widened E_{n,ell}" : "x in E_{n,ell}");
    const char* name = widened ? "ground-floor lower bound (widened)" : "ground-floor lower bound";
    Evaluated e = evaluate_sum(angle, x, count, pick_mode(mode, count));
    if (ell == 1) {
        if (e.mode == Mode::Exact)
            return compare_exact(name, e.exact, Relation::GreaterEqual, Rational(0));
        return compare_double(name, e.value, e.rel_error, e.condition_flag,
                              Relation::GreaterEqual, 0.0L);
    }
    long double rhs = std::log(static_cast<long double>(ell)) /
                      ((widened ? 4.0L : 1.0L) * to_long_double(angle.lambda(n)));
    return compare_evaluated(name, e, Relation::GreaterEqual, rhs);
}

HarmonicConstant harmonic_log_constant(std::int64_t a_max)
{
    if (a_max < 2)
        throw Error(ErrorKind::InvalidArgument, "a_max must be >= 2");
    HarmonicConstant h;
    long double sum = 0.0L;
    for (std::int64_t a = 2; a <= a_max; ++a) {
        long double la = std::log(static_cast<long double>(a));
        sum += 1.0L / la;
        long double ratio = sum * la / static_cast<long double>(a);
        if (ratio > h.smallest_C) {
            h.smallest_C = static_cast<double>(ratio);
            h.attained_at = a;
        }
    }
    h.holds_with_3 = h.smallest_C <= 3.0;
    return h;
}

}  // namespace toruslab
