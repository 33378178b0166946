#include "toruslab/bad_sets.hpp"

#include "toruslab/error.hpp"
#include "toruslab/rotation_renorm.hpp"

#include <algorithm>
#include <cmath>

namespace toruslab {

namespace {

constexpr std::int64_t kMaxEArcs = 2'000'000;

std::int64_t checked_count(const Angle& angle, int n, std::int64_t ell)
{
    if (ell < 1)
        throw Error(ErrorKind::RangeError, "ell must be >= 1");
    Integer count = angle.q(n) * ell;
    if (count >= angle.q(n + 1))
        throw Error(ErrorKind::RangeError, "ell q_n must stay below q_{n+1}");
    return to_int64(count);
}

using u128 = unsigned __int128;

template <class U>
U to_unsigned(const Integer& v)
{
    U out = 0;
    std::size_t count = 0;
    std::uint64_t words[2] = {0, 0};
    mpz_export(words, &count, -1, sizeof(std::uint64_t), 0, 0, v.get_mpz_t());
    out = static_cast<U>(words[0]);
    if constexpr (sizeof(U) > 8)
        out |= static_cast<U>(words[1]) << 64;
    return out;
}

template <class U>
Integer from_unsigned(U v)
{
    std::uint64_t words[2] = {static_cast<std::uint64_t>(v), 0};
    if constexpr (sizeof(U) > 8)
        words[1] = static_cast<std::uint64_t>(v >> 64);
    Integer out;
    mpz_import(out.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, words);
    return out;
}

// Numerators of the centres frac(-k alpha) = c_k / Q, sorted, for k < count.
template <class U>
std::vector<U> sorted_centres(const Integer& P, const Integer& Q, std::int64_t count)
{
    U q = to_unsigned<U>(Q);
    U step = q - to_unsigned<U>(P % Q);  // -P mod Q
    if (step == q)
        step = 0;
    std::vector<U> c(static_cast<std::size_t>(count));
    U cur = 0;
    for (std::int64_t k = 0; k < count; ++k) {
        c[static_cast<std::size_t>(k)] = cur;
        cur += step;
        if (cur >= q)
            cur -= q;
    }
    std::sort(c.begin(), c.end());
    return c;
}

template <class U>
EMeasure measure_from_centres(const std::vector<U>& c, const Integer& Q, const Integer& width)
{
    // Equal arcs of width w centred at sorted points cover sum_i min(gap_i, w).
    EMeasure m;
    m.disjoint = true;
    Integer total = 0;
    U w = to_unsigned<U>(width);
    U q = to_unsigned<U>(Q);
    for (std::size_t i = 0; i < c.size(); ++i) {
        U gap = i + 1 < c.size() ? c[i + 1] - c[i] : q - c[i] + c[0];
        if (c.size() == 1)
            gap = q;
        if (gap < w) {
            m.disjoint = false;
            total += from_unsigned(gap);
        } else {
            total += from_unsigned(w);
        }
    }
    m.measure = ratio(total, Q);
    return m;
}

EMeasure measure_from_centres_mpz(std::vector<Integer> c, const Integer& Q, const Integer& w)
{
    std::sort(c.begin(), c.end());
    EMeasure m;
    m.disjoint = true;
    Integer total = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        Integer gap = c.size() == 1 ? Q : (i + 1 < c.size() ? Integer(c[i + 1] - c[i])
                                                            : Integer(Q - c[i] + c[0]));
        if (gap < w) {
            m.disjoint = false;
            total += gap;
        } else {
            total += w;
        }
    }
    m.measure = ratio(total, Q);
    return m;
}

long double level_log_q(const Angle& angle, int n) { return log_of(angle.q(n)); }

// Half-width of I_{n,k}, rounded once to double and then held exactly so that the
// union builder and the membership test agree bit for bit. Empty when it covers the circle.
std::optional<Rational> half_width(const Angle& angle, long double u, int n, long double k)
{
    long double c = bad_c(angle, n, k);
    long double h = u / (2.0L * c);
    if (!(h < 0.5L))
        return std::nullopt;
    Rational r = exact_rational(static_cast<double>(h));
    if (r >= Rational(1, 2))
        return std::nullopt;
    return r;
}

// Sum over i in [I0, I1) of u / c_{n, floor(i/q_n)}: the total arc length of the B_i.
long double arc_length_sum(const Angle& angle, long double u, int n, long double I0,
                           long double I1)
{
    long double q = to_long_double(Rational(angle.q(n)));
    long double k_lo = std::floor(I0 / q);
    long double k_hi = std::floor((I1 - 1.0L) / q);
    auto count = [&](long double s, long double e) {
        long double lo = std::max(I0, s * q);
        long double hi = std::min(I1, e * q);
        return hi > lo ? hi - lo : 0.0L;
    };
    auto f = [&](long double k) { return u / bad_c(angle, n, k); };
    long double total = 0.0L;
    long double k = k_lo;
    const long double direct_end = k_lo + 100000.0L;
    for (; k <= k_hi && k < direct_end; k += 1.0L)
        total += count(k, k + 1.0L) * f(k);
    // Beyond the direct range, c is increasing in k, so bounding each geometric block by
    // its first term keeps the result an upper bound.
    while (k <= k_hi) {
        long double e = std::min(k_hi + 1.0L, std::floor(k * (1.0L + 1.0L / 64.0L)) + 1.0L);
        total += count(k, e) * f(k);
        k = e;
    }
    return total;
}

long double schedule_at(const Schedule& s, int n)
{
    long double v = s.value(n);
    if (!(v > 0.0L) || !std::isfinite(v))
        throw Error(ErrorKind::RangeError, s.name + " schedule must be positive", n);
    return v;
}

}  // namespace

IntervalUnion build_E(const Angle& angle, int n, std::int64_t ell, bool widened)
{
    angle.require_level(n, "E level");
    std::int64_t count = checked_count(angle, n, ell);
    if (count > kMaxEArcs)
        throw Error(ErrorKind::RangeError, "too many arcs for an explicit union");
    Rational w = widened ? Rational(2 * angle.lambda(n)) : Rational(angle.lambda(n) / 2);
    std::vector<CenteredArc> arcs;
    arcs.reserve(static_cast<std::size_t>(count));
    Rational centre = 0;
    Rational step = frac(-angle.value());
    for (std::int64_t k = 0; k < count; ++k) {
        arcs.push_back({centre, w, false});
        centre += step;
        if (centre >= 1)
            centre -= 1;
    }
    return IntervalUnion::from_arcs(arcs);
}

std::optional<std::int64_t> first_close_visit(const Angle& angle, const Rational& x,
                                              std::int64_t count, const Rational& half_width)
{
    FastOrbit orb(angle, x);
    double w = to_double(half_width) + 1e-14;
    for (std::int64_t k = 0; k < count; ++k) {
        if (orb.norm(k) < w &&
            circle_norm(x + Rational(to_integer(k)) * angle.value()) < half_width)
            return k;
    }
    return std::nullopt;
}

EMeasure e_measure_certified(const Angle& angle, int n, std::int64_t ell)
{
    angle.require_level(n, "E level");
    std::int64_t count = checked_count(angle, n, ell);
    const Rational& alpha = angle.value();
    const Integer& Q = alpha.get_den();
    const Integer& P = alpha.get_num();
    Integer width = angle.lambda(n).get_num() * (Q / angle.lambda(n).get_den());
    // Below 2^62 (resp. 2^126) a sum of two residues still fits the word.
    std::size_t bits = mpz_sizeinbase(Q.get_mpz_t(), 2);
    if (bits <= 62)
        return measure_from_centres(sorted_centres<std::uint64_t>(P, Q, count), Q, width);
    if (bits <= 126)
        return measure_from_centres(sorted_centres<u128>(P, Q, count), Q, width);
    std::vector<Integer> c(static_cast<std::size_t>(count));
    Integer step = Q - P % Q;
    Integer cur = 0;
    for (std::int64_t k = 0; k < count; ++k) {
        c[static_cast<std::size_t>(k)] = cur;
        cur += step;
        if (cur >= Q)
            cur -= Q;
    }
    return measure_from_centres_mpz(std::move(c), Q, width);
}

Schedule schedule_power(long double exponent)
{
    return {"n^" + std::to_string(static_cast<double>(exponent)),
            [exponent](int n) { return std::pow(static_cast<long double>(n), exponent); }};
}

Schedule schedule_loglog()
{
    return {"loglog(n+3)",
            [](int n) { return std::log(std::log(static_cast<long double>(n) + 3.0L)); }};
}

Schedule schedule_v_default()
{
    return {"ceil(log(n+2))",
            [](int n) { return std::ceil(std::log(static_cast<long double>(n) + 2.0L)); }};
}

long double bad_a(const Angle& angle, int n, long double k)
{
    return std::log(k) / to_long_double(angle.lambda(n));
}

long double bad_b(const Angle& angle, int n, long double k)
{
    return k * level_log_q(angle, n) / to_long_double(angle.lambda(n - 1));
}

long double bad_c(const Angle& angle, int n, long double k)
{
    return std::max(bad_a(angle, n, k), bad_b(angle, n, k));
}

std::pair<int, Integer> bad_index(const Angle& angle, const Integer& i)
{
    if (sgn(i) <= 0)
        throw Error(ErrorKind::RangeError, "i must be positive");
    int N = angle.depth();
    if (i >= angle.q(N))
        throw Error(ErrorKind::LevelBeyondHorizon, "i is beyond the known convergents");
    int n = 0;
    while (n + 1 <= N && angle.q(n + 1) <= i)
        ++n;
    return {n, Integer(i / angle.q(n))};
}

BadSetLevel build_bad_sets(const Angle& angle, const Schedule& u, const Schedule& v, int n,
                           std::int64_t exact_limit)
{
    angle.require_level(n, "bad-set level", 2);
    BadSetLevel level;
    level.n = n;
    level.u = schedule_at(u, n);
    level.v = schedule_at(v, n);
    long double v_next = std::ceil(schedule_at(v, n + 1));
    long double v_here = std::ceil(level.v);

    const Integer& qn = angle.q(n);
    const Integer& qn1 = angle.q(n + 1);
    Integer I0 = qn, I1 = qn1;
    Integer J0 = qn * Integer(static_cast<long>(v_here));
    Integer J1 = qn1 * Integer(static_cast<long>(v_next));
    if (J1 <= J0)
        throw Error(ErrorKind::InvariantBroken, "v_n q_n must increase with n", n);

    level.union_bound = std::min(
        1.0L, arc_length_sum(angle, level.u, n, to_long_double(Rational(I0)),
                             to_long_double(Rational(I1))));
    level.tilde_union_bound = std::min(
        1.0L, arc_length_sum(angle, level.u, n, to_long_double(Rational(J0)),
                             to_long_double(Rational(J1))));

    auto build = [&](const Integer& lo, const Integer& hi) -> std::optional<IntervalUnion> {
        Integer span = hi - lo;
        if (span > exact_limit)
            return std::nullopt;
        std::vector<CenteredArc> arcs;
        std::int64_t i0 = to_int64(lo), i1 = to_int64(hi);
        std::int64_t q = to_int64(qn);
        arcs.reserve(static_cast<std::size_t>(i1 - i0));
        std::optional<Rational> h;
        std::int64_t h_k = -1;
        for (std::int64_t i = i0; i < i1; ++i) {
            std::int64_t k = i / q;
            if (k != h_k) {
                h = half_width(angle, level.u, n, static_cast<long double>(k));
                h_k = k;
            }
            if (!h) {
                // One arc reaches all the way round.
                return IntervalUnion::from_arcs(
                    {{Rational(1, 4), Rational(1, 4), true}, {Rational(3, 4), Rational(1, 4), true}});
            }
            arcs.push_back({frac(-Rational(to_integer(i)) * angle.value()), *h, true});
        }
        return IntervalUnion::from_arcs(arcs);
    };
    level.D = build(I0, I1);
    level.D_tilde = build(J0, J1);
    return level;
}

std::vector<BadSetLedgerRow> bad_set_ledger(const Angle& angle, const Schedule& u,
                                            const Schedule& v, int n_lo, int n_hi,
                                            std::int64_t exact_limit)
{
    if (n_lo < 2)
        n_lo = 2;
    std::vector<BadSetLedgerRow> rows;
    long double partial = 0.0L, weighted = 0.0L;
    for (int n = n_lo; n <= n_hi; ++n) {
        BadSetLevel level = build_bad_sets(angle, u, v, n, exact_limit);
        BadSetLedgerRow row;
        row.n = n;
        row.u = level.u;
        row.v = level.v;
        if (level.D) {
            row.measure = to_long_double(level.D->measure());
            row.measure_exact = true;
        } else {
            row.measure = level.union_bound;
        }
        partial += row.measure;
        weighted += row.v * row.measure;
        row.partial_sum = partial;
        row.v_weighted_partial = weighted;
        row.v_next_over_u = schedule_at(v, n + 1) / level.u;
        rows.push_back(row);
    }
    return rows;
}

bool in_bad_set(const Angle& angle, const Schedule& u, int n, const Rational& x)
{
    angle.require_level(n, "bad-set level", 2);
    long double un = schedule_at(u, n);
    const Integer& qn = angle.q(n);
    if (qn > 20'000'000)
        throw Error(ErrorKind::RangeError, "q_n too large for the membership scan");
    std::int64_t q = to_int64(qn);
    const Integer& a = angle.a(n + 1);
    const Rational& rho = angle.rho(n);

    std::optional<Rational> h1 = half_width(angle, un, n, 1.0L);
    if (!h1)
        return true;

    // Block k (i = k q_n + j) is the base orbit shifted by k rho_n, and |k rho_n| < lambda^{(n-1)},
    // so only base points this close to 0 can ever enter an arc.
    double reach = to_double(angle.lambda(n - 1)) + to_double(*h1) + 1e-13;

    // Crossover points of the a- and b-regimes of c_{n,k}; h_k is convex on each regime.
    std::vector<long double> pieces = {1.0L};
    long double R = to_long_double(angle.lambda(n)) * level_log_q(angle, n) /
                    to_long_double(angle.lambda(n - 1));
    if (R < 1.0L / std::exp(1.0L)) {
        auto g = [R](long double k) { return std::log(k) / k - R; };
        auto root = [&](long double lo, long double hi) {
            for (int it = 0; it < 200; ++it) {
                long double mid = lo + (hi - lo) / 2;
                if ((g(lo) < 0) == (g(mid) < 0))
                    lo = mid;
                else
                    hi = mid;
            }
            return lo;
        };
        long double e = std::exp(1.0L);
        pieces.push_back(root(1.0L, e));
        long double hi = e;
        while (g(hi) > 0)
            hi *= 2;
        pieces.push_back(root(e, hi));
    }

    FastOrbit orb(angle, x);
    for (std::int64_t j = 0; j < q; ++j) {
        if (orb.norm(j) > reach)
            continue;
        Rational p = frac(x + Rational(to_integer(j)) * angle.value());
        Rational s = p > Rational(1, 2) ? Rational(p - 1) : p;
        Integer kmax = j < to_int64(angle.q(n - 1)) ? a : Integer(a - 1);
        if (kmax < 1)
            continue;
        Rational kstar = -s / rho;
        Integer fl = floor_of(kstar);
        std::vector<Integer> cand;
        auto add = [&](const Integer& k) {
            for (int d = -1; d <= 1; ++d) {
                Integer kk = k + d;
                if (kk >= 1 && kk <= kmax)
                    cand.push_back(kk);
            }
        };
        add(Integer(1));
        add(fl);
        add(Integer(fl + 1));
        add(kmax);
        for (long double pc : pieces) {
            mpz_class kk;
            mpz_set_d(kk.get_mpz_t(), static_cast<double>(std::floor(pc)));
            add(kk);
            add(Integer(kk + 1));
        }
        for (const Integer& k : cand) {
            std::optional<Rational> h = half_width(angle, un, n, to_long_double(Rational(k)));
            if (!h || abs(s + k * rho) <= *h)
                return true;
        }
    }
    return false;
}

BoundCheck bad_set_escape_check(const Angle& angle, const Schedule& u, int n, const Rational& x,
                                std::int64_t i, const Rational& x_prime, std::optional<Mode> mode)
{
    angle.require_level(n, "bad-set level", 2);
    if (!(angle.q(n) <= i && angle.q(n + 1) > i))
        hypothesis_violated("q_n <= i < q_{n+1}");
    if (circle_norm(x - x_prime) > angle.lambda(n))
        hypothesis_violated("||x-x'|| <= lambda^{(n)}");
    if (in_bad_set(angle, u, n, x))
        hypothesis_violated("x not in D_n");
    Rational d = circle_norm(x + Rational(to_integer(i)) * angle.value());
    if (sgn(d) == 0)
        throw Error(ErrorKind::OrbitHitsPole, "R^i x = 0", i);
    long double rhs = schedule_at(u, n) * to_long_double(1 / d) / 8.0L;
    Mode m = mode ? *mode : (i <= kExactTermLimit ? Mode::Exact : Mode::Double);
    const char* name = "bad-set escape";
    if (m == Mode::Exact)
        return compare_exact(name, birkhoff_sum(angle, x_prime, i), Relation::GreaterEqual, rhs);
    DoubleSum s = birkhoff_sum_double(angle, x_prime, i);
    return compare_double(name, s.value, s.rel_error_bound, s.condition_flag,
                          Relation::GreaterEqual, rhs);
}

std::vector<long double> escape_series(const Angle& angle,
                                          const std::function<long double(int)>& phi, int N)
{
    angle.require_level(N, "series depth", 1);
    std::vector<long double> sums;
    sums.reserve(static_cast<std::size_t>(N));
    long double total = 0.0L;
    for (int n = 1; n <= N; ++n) {
        long double f = phi(n);
        if (f < 0.0L || std::isnan(f))
            throw Error(ErrorKind::InvalidArgument, "phi must be nonnegative", n);
        long double gap = to_long_double(Rational(angle.q(n) - angle.q(n - 1)));
        total += gap * std::min(f, to_long_double(angle.lambda(n - 1)));
        sums.push_back(total);
    }
    return sums;
}

std::function<long double(int)> divergence_phi(const Angle& angle)
{
    return [angle](int n) -> long double {
        if (n < 2 || angle.a(n) < 2 || angle.a(n + 1) < 2)
            return 0.0L;
        long double q = to_long_double(Rational(angle.q(n)));
        long double eps = 1.0L / std::log(static_cast<long double>(n));
        return eps / (q * std::log(3.0L * q));
    };
}

}  // namespace toruslab
