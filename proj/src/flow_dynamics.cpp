#include "toruslab/flow_dynamics.hpp"

#include "toruslab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace toruslab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Neumaier {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v)
    {
        double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

std::vector<std::int64_t> log_grid(std::int64_t n, int per_decade)
{
    std::vector<std::int64_t> out;
    if (per_decade < 1)
        per_decade = 1;
    for (int j = 0;; ++j) {
        double v = std::pow(10.0, static_cast<double>(j) / per_decade);
        auto k = static_cast<std::int64_t>(std::llround(v));
        if (k > n)
            break;
        if (out.empty() || out.back() != k)
            out.push_back(k);
    }
    if (out.empty() || out.back() != n)
        out.push_back(n);
    return out;
}

double torus_distance(double x, double y, double px, double py)
{
    double dx = std::fabs(x - px);
    double dy = std::fabs(y - py);
    dx = std::min(dx, 1.0 - dx);
    dy = std::min(dy, 1.0 - dy);
    return std::hypot(dx, dy);
}

double wrap_delta(double d)
{
    d -= std::floor(d);
    return d > 0.5 ? d - 1.0 : d;
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

std::pair<double, double> gk15(const std::function<double(double)>& f, double lo, double hi)
{
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double fc = f(c);
    double k = fc * kWgk[7];
    double g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXgk[static_cast<std::size_t>(j)];
        double s = f(c - dx) + f(c + dx);
        k += kWgk[static_cast<std::size_t>(j)] * s;
        if (j % 2 == 1)
            g += kWg[static_cast<std::size_t>(j / 2)] * s;
    }
    return {k * h, std::fabs((k - g) * h)};
}

}  // namespace

const char* to_string(SpeedModel model)
{
    return model == SpeedModel::MinDistance ? "min-distance" : "quadratic-hessian";
}

TorusPoint linear_flow(const Angle& angle, const TorusPoint& p, const Rational& t)
{
    return {frac(p.x + t), frac(p.y + t * angle.value())};
}

SectionData section_setup(const FlowParams& params)
{
    if (params.p.x == params.q.x && params.p.y == params.q.y)
        throw Error(ErrorKind::InvalidArgument, "p and q must differ");
    const Rational& alpha = params.angle.value();
    auto compute = [&](const Rational& x0) {
        SectionData s;
        s.x0 = frac(x0);
        s.r_p = frac(params.p.x - s.x0);
        s.r_q = frac(params.q.x - s.x0);
        if (sgn(s.r_p) == 0)
            throw Error(ErrorKind::SectionThroughStoppingPoint, "the section contains p");
        if (sgn(s.r_q) == 0)
            throw Error(ErrorKind::SectionThroughStoppingPoint, "the section contains q");
        s.p0 = frac(params.p.y - s.r_p * alpha);
        s.q0 = frac(params.q.y - s.r_q * alpha);
        s.beta = frac(s.q0 - s.p0);
        return s;
    };
    SectionData s = compute(params.section_x0);
    if (s.p0 != s.q0)
        return s;
    // p and q sit on one flow segment between two visits to the section; cutting that
    // segment between them puts one of the two a full turn later.
    const TorusPoint& first = s.r_p < s.r_q ? params.p : params.q;
    Rational gap = abs(s.r_q - s.r_p);
    s = compute(first.x + gap / 2);
    if (s.p0 == s.q0)
        throw Error(ErrorKind::InvariantBroken, "could not separate p0 and q0");
    return s;
}

Quadrature integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                              double tol)
{
    struct Piece {
        double lo, hi, value, error;
    };
    std::vector<Piece> stack;
    auto [v0, e0] = gk15(f, lo, hi);
    stack.push_back({lo, hi, v0, e0});
    Quadrature q;
    q.intervals = 1;
    double total = v0, err = e0;
    while (err > tol * std::max(std::fabs(total), 1e-300) && q.intervals < 20000) {
        auto worst = std::max_element(stack.begin(), stack.end(),
                                      [](const Piece& a, const Piece& b) { return a.error < b.error; });
        Piece w = *worst;
        stack.erase(worst);
        double mid = 0.5 * (w.lo + w.hi);
        auto [vl, el] = gk15(f, w.lo, mid);
        auto [vr, er] = gk15(f, mid, w.hi);
        stack.push_back({w.lo, mid, vl, el});
        stack.push_back({mid, w.hi, vr, er});
        ++q.intervals;
        total = 0.0;
        err = 0.0;
        for (const auto& p : stack) {
            total += p.value;
            err += p.error;
        }
    }
    Neumaier s;
    for (const auto& p : stack)
        s.add(p.value);
    q.value = s.value();
    q.error = err;
    return q;
}

KappaResult kappa_quadratic(double a, double b, double c, double delta, double y)
{
    double d = a * c - b * b;
    if (!(a > 0.0) || !(d > 0.0))
        throw Error(ErrorKind::NotPositiveDefinite, "need a > 0 and ac - b^2 > 0");
    if (y == 0.0)
        throw Error(ErrorKind::PoleAtZero, "y = 0");
    if (!(delta > 0.0))
        throw Error(ErrorKind::InvalidArgument, "delta must be positive");
    double ay = std::fabs(y);
    double s = ay * std::sqrt(d);
    double yy = y;
    KappaResult r;
    r.closed_form = (std::atan((a * delta + b * yy) / s) - std::atan((-a * delta + b * yy) / s)) / s;
    auto f = [=](double x) { return 1.0 / (a * x * x + 2.0 * b * x * yy + c * yy * yy); };
    // Split at the speed minimum so the peak sits on a panel boundary.
    double peak = -b * yy / a;
    Quadrature q;
    if (peak > -delta && peak < delta) {
        Quadrature l = integrate_adaptive(f, -delta, peak);
        Quadrature h = integrate_adaptive(f, peak, delta);
        q.value = l.value + h.value;
        q.error = l.error + h.error;
    } else {
        q = integrate_adaptive(f, -delta, delta);
    }
    r.quadrature = q.value;
    r.quadrature_error = q.error;
    r.residual = q.value - kPi / (std::sqrt(d) * ay);
    return r;
}

double roof(const FlowParams& params, const SectionData& section, const Rational& y)
{
    Rational dp = circle_norm(y - section.p0);
    Rational dq = circle_norm(y - section.q0);
    if (sgn(dp) == 0)
        throw Error(ErrorKind::PoleAtCusp, "y = p0");
    if (sgn(dq) == 0)
        throw Error(ErrorKind::PoleAtCusp, "y = q0");
    return kPi / (std::sqrt(params.d_p) * to_double(dp)) +
           kPi / (std::sqrt(params.d_q) * to_double(dq));
}

OccupancySeries special_flow_simulate(const FlowParams& params, const Rational& x,
                                      const SpecialFlowOptions& options)
{
    if (options.returns < 1)
        throw Error(ErrorKind::InvalidArgument, "need at least one return");
    if (!(params.d_p > 0.0) || !(params.d_q > 0.0))
        throw Error(ErrorKind::NonPositiveDeterminant, "d_p and d_q must be positive");
    if (options.model == RoofModel::QuadraticBoxes && !(options.box_r > 0.0 && options.box_r < 0.25))
        throw Error(ErrorKind::InvalidArgument, "box_r must lie in (0, 1/4)");
    SectionData sec = section_setup(params);
    const Angle& angle = params.angle;
    const std::int64_t N = options.returns;

    bool exact_ok = params.d_p == params.d_q && options.model == RoofModel::Principal;
    Mode mode = options.mode ? *options.mode
                             : (exact_ok && N <= 20'000 ? Mode::Exact : Mode::Double);
    if (mode == Mode::Exact && !exact_ok)
        throw Error(ErrorKind::InvalidArgument,
                    "exact mode needs d_p = d_q and the principal roof");

    OccupancySeries out;
    out.mode = mode;
    std::vector<std::int64_t> marks;
    if (options.grid.every > 0) {
        for (std::int64_t n = options.grid.every; n <= N; n += options.grid.every)
            marks.push_back(n);
        if (marks.empty() || marks.back() != N)
            marks.push_back(N);
    } else {
        marks = log_grid(N, options.grid.per_decade);
    }

    Rational xp = x - sec.p0, xq = x - sec.q0;
    FastOrbit op(angle, xp), oq(angle, xq);
    double sp = std::sqrt(params.d_p), sq = std::sqrt(params.d_q);
    double r = options.box_r;
    auto box_time = [r](double u, double sd) {
        // a = 1, b = 0, c = d: crossing time of [-r, r] at offset u.
        return 2.0 / (u * sd) * std::atan(r / (u * sd));
    };
    Neumaier A, B, C, T;
    Rational exact_p = 0, exact_q = 0;
    std::int64_t exact_done = 0;
    std::size_t mark = 0;
    const std::int64_t tail_start = N / 10;
    out.tail_theta_min = INFINITY;
    out.tail_theta_max = -INFINITY;

    for (std::int64_t i = 0; i < N; ++i) {
        double np = op.norm(i), nq = oq.norm(i);
        if (np < 1e-13 && sgn(circle_norm(xp + Rational(to_integer(i)) * angle.value())) == 0)
            throw Error(ErrorKind::OrbitHitsCusp, "orbit reaches p0", i);
        if (nq < 1e-13 && sgn(circle_norm(xq + Rational(to_integer(i)) * angle.value())) == 0)
            throw Error(ErrorKind::OrbitHitsCusp, "orbit reaches q0", i);
        if (np < 1e-12 || nq < 1e-12)
            out.condition_flag = true;
        double a, b, c;
        if (options.model == RoofModel::Principal) {
            a = kPi / (sp * np);
            b = kPi / (sq * nq);
            c = 0.0;
        } else {
            a = box_time(np, sp);
            b = box_time(nq, sq);
            c = 1.0 - 4.0 * r;
        }
        A.add(a);
        B.add(b);
        C.add(c);
        T.add(a + b + c);
        std::int64_t n = i + 1;
        double av = A.value(), bv = B.value();
        double theta = (sp * av) / (sq * bv);
        if (n > tail_start) {
            out.tail_theta_min = std::min(out.tail_theta_min, theta);
            out.tail_theta_max = std::max(out.tail_theta_max, theta);
        }
        if (mark < marks.size() && marks[mark] == n) {
            ++mark;
            OccupancyRow row;
            row.n = n;
            row.A = av;
            row.B = bv;
            row.C = C.value();
            row.T = T.value();
            row.occ_p = av / row.T;
            row.occ_q = bv / row.T;
            row.theta_proxy = theta;
            if (mode == Mode::Exact) {
                exact_p += birkhoff_sum_range(angle, xp, exact_done, n);
                exact_q += birkhoff_sum_range(angle, xq, exact_done, n);
                exact_done = n;
                row.occ_p_exact = exact_p / (exact_p + exact_q);
                row.theta_exact = exact_p / exact_q;
            }
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

EulerSeries euler_torus_simulate(const FlowParams& params, std::pair<double, double> start,
                                 const EulerOptions& options)
{
    if (!(options.delta > 0.0))
        throw Error(ErrorKind::InvalidArgument, "step delta must be positive");
    double alpha = params.angle.alpha_hi() + params.angle.alpha_lo();
    double px = to_double(params.p.x), py = to_double(params.p.y);
    double qx = to_double(params.q.x), qy = to_double(params.q.y);
    double sdp = std::sqrt(params.d_p), sdq = std::sqrt(params.d_q);
    auto speed = [&](double x, double y) {
        if (options.unit_speed)
            return 1.0;
        if (params.speed_model == SpeedModel::MinDistance)
            return std::min(torus_distance(x, y, px, py), torus_distance(x, y, qx, qy));
        double ux = wrap_delta(x - px), uy = wrap_delta(y - py);
        double vx = wrap_delta(x - qx), vy = wrap_delta(y - qy);
        return std::min({1.0, ux * ux + sdp * sdp * uy * uy, vx * vx + sdq * sdq * vy * vy});
    };

    std::vector<std::int64_t> marks = log_grid(options.steps, options.per_decade);
    EulerSeries out;
    double x = start.first - std::floor(start.first);
    double y = start.second - std::floor(start.second);
    std::size_t mark = 0;
    for (std::int64_t k = 0; k < options.steps; ++k) {
        bool in_p = torus_distance(x, y, px, py) < options.ball_r;
        bool in_q = torus_distance(x, y, qx, qy) < options.ball_r;
        out.in_p += in_p;
        out.in_q += in_q;
        if (k < options.trajectory_limit)
            out.trajectory.push_back({k, x, y, in_p, in_q});
        std::int64_t n = k + 1;
        if (mark < marks.size() && marks[mark] == n) {
            ++mark;
            out.rows.push_back({n, std::log10(static_cast<double>(n)), x, y,
                                static_cast<double>(out.in_p) / static_cast<double>(n),
                                static_cast<double>(out.in_q) / static_cast<double>(n)});
        }
        double step = options.delta * speed(x, y);
        if (step < 1e-30)
            throw Error(ErrorKind::Stagnation, "step displacement below 1e-30", k);
        x += step;
        y += step * alpha;
        x -= std::floor(x);
        y -= std::floor(y);
    }
    return out;
}

double euler_box_occupancy(const Angle& angle, std::pair<double, double> start, double delta,
                           std::int64_t steps, double x0, double x1, double y0, double y1)
{
    double alpha = angle.alpha_hi() + angle.alpha_lo();
    double x = start.first - std::floor(start.first);
    double y = start.second - std::floor(start.second);
    std::int64_t hits = 0;
    for (std::int64_t k = 0; k < steps; ++k) {
        hits += (x >= x0 && x < x1 && y >= y0 && y < y1);
        x += delta;
        y += delta * alpha;
        x -= std::floor(x);
        y -= std::floor(y);
    }
    return static_cast<double>(hits) / static_cast<double>(steps);
}

MuInfinity mu_infinity(double d_p, double d_q)
{
    if (!(d_p > 0.0) || !(d_q > 0.0))
        throw Error(ErrorKind::NonPositiveDeterminant, "determinants must be positive");
    double sp = std::sqrt(d_p), sq = std::sqrt(d_q);
    MuInfinity m;
    m.weight_p = sq / (sp + sq);
    m.weight_q = sp / (sp + sq);
    return m;
}

std::pair<double, double> pomega_estimate(const std::vector<double>& occupancy,
                                          double tail_fraction)
{
    if (occupancy.empty())
        throw Error(ErrorKind::EmptySeries, "no occupancy rows");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "tail fraction must lie in (0, 1]");
    auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(occupancy.size())));
    count = std::clamp<std::size_t>(count, 1, occupancy.size());
    auto first = occupancy.end() - static_cast<std::ptrdiff_t>(count);
    auto [lo, hi] = std::minmax_element(first, occupancy.end());
    return {*lo, *hi};
}

std::vector<EmptyBand> empty_bands(std::vector<double> values, double min_width)
{
    std::vector<EmptyBand> bands;
    if (values.empty())
        return bands;
    for (double& v : values)
        v -= std::floor(v);
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i + 1] - values[i] > min_width)
            bands.push_back({values[i], values[i + 1]});
    }
    double wrap = values.front() + 1.0 - values.back();
    if (wrap > min_width)
        bands.push_back({values.back(), values.front() + 1.0});
    return bands;
}

}  // namespace toruslab
