#include "toruslab/rotation_renorm.hpp"

#include "toruslab/error.hpp"

#include <algorithm>

namespace toruslab {

namespace {

constexpr std::int64_t kMaxPoints = 20'000'000;

std::int64_t small_int(const Integer& v, const char* what)
{
    if (!fits_int64(v) || v > kMaxPoints)
        throw Error(ErrorKind::RangeError, std::string(what) + " too large for enumeration");
    return to_int64(v);
}

void step(Rational& y, const Rational& alpha)
{
    y += alpha;
    if (y >= 1)
        y -= 1;
}

void unstep(Rational& y, const Rational& alpha)
{
    y -= alpha;
    if (sgn(y) < 0)
        y += 1;
}

}  // namespace

OrbitSegment orbit(const Angle& angle, const Rational& x, std::int64_t k)
{
    if (k < 1)
        throw Error(ErrorKind::InvalidArgument, "orbit length must be >= 1");
    if (k > kMaxPoints)
        throw Error(ErrorKind::RangeError, "orbit too long for exact enumeration");
    OrbitSegment seg;
    seg.base = frac(x);
    seg.length = k;
    seg.points.reserve(static_cast<std::size_t>(k));
    Rational alpha = frac(angle.value());
    Rational y = seg.base;
    for (std::int64_t i = 0; i < k; ++i) {
        seg.points.push_back(y);
        step(y, alpha);
    }
    return seg;
}

GapStats gap_stats(const Angle& angle, const OrbitSegment& segment)
{
    if (segment.points.size() < 2)
        throw Error(ErrorKind::RangeError, "a single point has no gaps");
    std::vector<Rational> pts = segment.points;
    std::sort(pts.begin(), pts.end());
    GapStats g;
    g.min_gap = pts.front() + 1 - pts.back();
    g.max_gap = g.min_gap;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        Rational d = pts[i] - pts[i - 1];
        if (d < g.min_gap)
            g.min_gap = d;
        if (d > g.max_gap)
            g.max_gap = d;
    }
    for (int n = angle.horizon(); n >= 1; --n) {
        if (angle.q(n) == segment.length) {
            g.level = n;
            break;
        }
    }
    if (g.level && sgn(segment.base) == 0) {
        int n = *g.level;
        g.identities_checked = true;
        if (g.min_gap != angle.lambda(n - 1) || g.max_gap != angle.lambda(n) + angle.lambda(n - 1))
            throw Error(ErrorKind::InvariantBroken,
                        "gap identities fail at n=" + std::to_string(n));
    }
    return g;
}

OrbitDecomposition orbit_decomposition(const Angle& angle, std::int64_t m, int n)
{
    angle.require_level(n, "decomposition level");
    if (m <= 0 || !(angle.q(n + 1) > m))
        throw Error(ErrorKind::RangeError, "need 0 < m < q_{n+1}");
    std::int64_t qn = small_int(angle.q(n), "q_n");
    OrbitDecomposition d;
    d.ell = m / qn;
    d.r = m % qn;

    std::vector<Rational> lhs = orbit(angle, 0, m).points;
    std::vector<Rational> rhs;
    rhs.reserve(static_cast<std::size_t>(m));
    const Rational& rho = angle.rho(n);
    std::vector<Rational> base = orbit(angle, 0, qn).points;
    for (std::int64_t i = 0; i <= d.ell; ++i) {
        std::int64_t count = i < d.ell ? qn : d.r;
        Rational shift = rho * to_integer(i);
        for (std::int64_t j = 0; j < count; ++j)
            rhs.push_back(frac(base[static_cast<std::size_t>(j)] + shift));
    }
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    d.holds = lhs == rhs;
    return d;
}

bool Arc::contains(const Rational& x) const
{
    return frac(x - start) < length;
}

namespace {

Arc delta_arc(const Angle& angle, int n)
{
    if (n % 2 == 0)
        return {Rational(0), angle.lambda(n)};
    return {1 - angle.lambda(n), angle.lambda(n)};
}

}  // namespace

RenormLevel renorm_level(const Angle& angle, int n)
{
    angle.require_level(n, "renormalization level", 0);
    if (n > angle.horizon() - 1)
        throw Error(ErrorKind::LevelBeyondHorizon, "renormalization needs n <= horizon - 1");
    RenormLevel lv;
    lv.n = n;
    lv.delta_n = delta_arc(angle, n);
    lv.delta_n1 = delta_arc(angle, n + 1);
    lv.large_floors = angle.q(n + 1);
    lv.small_floors = angle.q(n);
    return lv;
}

bool verify_partition(const Angle& angle, const RenormLevel& level)
{
    std::int64_t big = small_int(level.large_floors, "q_{n+1}");
    std::int64_t small = small_int(level.small_floors, "q_n");
    Rational alpha = frac(angle.value());
    std::vector<Arc> arcs;
    arcs.reserve(static_cast<std::size_t>(big + small));
    Rational total = 0;
    for (const auto& [base, count] : {std::pair{level.delta_n, big}, std::pair{level.delta_n1, small}}) {
        Rational s = base.start;
        for (std::int64_t j = 0; j < count; ++j) {
            arcs.push_back({s, base.length});
            total += base.length;
            step(s, alpha);
        }
    }
    if (total != 1)
        return false;
    std::sort(arcs.begin(), arcs.end(),
              [](const Arc& a, const Arc& b) { return a.start < b.start; });
    for (std::size_t i = 0; i + 1 < arcs.size(); ++i)
        if (arcs[i].start + arcs[i].length != arcs[i + 1].start)
            return false;
    return arcs.back().start + arcs.back().length == arcs.front().start + 1;
}

TowerAddress tower_address(const Angle& angle, const Rational& x, int n)
{
    RenormLevel lv = renorm_level(angle, n);
    std::int64_t big = small_int(lv.large_floors, "q_{n+1}");
    std::int64_t small = small_int(lv.small_floors, "q_n");
    Rational alpha = frac(angle.value());
    Rational y = frac(x);
    for (std::int64_t j = 0; j < big; ++j) {
        if (lv.delta_n.contains(y))
            return {Tower::Large, j, y};
        if (j < small && lv.delta_n1.contains(y))
            return {Tower::Small, j, y};
        unstep(y, alpha);
    }
    throw Error(ErrorKind::InvariantBroken, "point not covered by the towers");
}

std::vector<ReturnRecord> first_return_check(const Angle& angle, int n,
                                             const std::vector<Rational>& samples)
{
    RenormLevel lv = renorm_level(angle, n);
    std::int64_t big = small_int(lv.large_floors, "q_{n+1}");
    std::int64_t small = small_int(lv.small_floors, "q_n");
    Rational alpha = frac(angle.value());
    const Arc& even = n % 2 == 0 ? lv.delta_n : lv.delta_n1;
    auto lift = [&](const Rational& y) { return even.contains(y) ? y : Rational(y - 1); };
    Rational L = angle.lambda(n) + angle.lambda(n + 1);
    Rational shift = n % 2 == 0 ? angle.lambda(n) : Rational(-angle.lambda(n));

    std::vector<ReturnRecord> out;
    for (const Rational& s0 : samples) {
        Rational s = frac(s0);
        bool in_big = lv.delta_n.contains(s);
        bool in_small = lv.delta_n1.contains(s);
        if (!in_big && !in_small)
            throw Error(ErrorKind::SampleOutsideDomain, to_decimal(s) + " not in Delta(n)");
        ReturnRecord rec;
        rec.sample = s;
        rec.expected_time = in_big ? big : small;
        Rational y = s;
        for (std::int64_t t = 1; t <= big; ++t) {
            step(y, alpha);
            if (lv.delta_n.contains(y) || lv.delta_n1.contains(y)) {
                rec.return_time = t;
                break;
            }
        }
        rec.returned = y;
        rec.time_ok = rec.return_time == rec.expected_time;
        Rational k = (lift(y) - lift(s) - shift) / L;
        rec.rotation_ok = rec.return_time > 0 && k.get_den() == 1;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<std::int64_t> near_rational_bijection(const Angle& angle, int n)
{
    angle.require_level(n, "bijection level");
    if (angle.a(n + 1) < 2)
        hypothesis_violated("a_{n+1} >= 2");
    std::int64_t qn = small_int(angle.q(n), "q_n");
    Rational alpha = frac(angle.value());
    std::vector<std::int64_t> sigma(static_cast<std::size_t>(qn));
    std::vector<char> seen(static_cast<std::size_t>(qn), 0);
    Rational y = 0;
    for (std::int64_t k = 0; k < qn; ++k) {
        Integer nearest = floor_of(y * angle.q(n) + Rational(1, 2));
        std::int64_t s = to_int64(nearest) % qn;
        if (circle_norm(y - ratio(to_integer(s), angle.q(n))) >= angle.lambda(n) ||
            seen[static_cast<std::size_t>(s)])
            throw Error(ErrorKind::InvariantBroken,
                        "near-rational bijection fails at k=" + std::to_string(k));
        seen[static_cast<std::size_t>(s)] = 1;
        sigma[static_cast<std::size_t>(k)] = s;
        step(y, alpha);
    }
    return sigma;
}

}  // namespace toruslab
