#include "toruslab/classifiers.hpp"

#include "toruslab/error.hpp"

#include <algorithm>
#include <cmath>

namespace toruslab {

namespace {

int scan_depth(const Angle& angle, int depth) { return std::min(depth, angle.horizon()); }

std::string int_text(const Integer& v) { return v.get_str(); }

// (num, den) for nu when it is a ratio of small integers.
std::optional<std::pair<unsigned long, unsigned long>> small_ratio(double nu)
{
    if (!(nu >= 0.0))
        return std::nullopt;
    // Accept doubles that round from p/d, such as 1.0 / 3.0.
    for (unsigned long d = 1; d <= 64; ++d) {
        double p = std::round(nu * static_cast<double>(d));
        if (p > 4096.0)
            return std::nullopt;
        if (std::fabs(p / static_cast<double>(d) - nu) <= 4e-16 * std::max(nu, 1.0))
            return std::make_pair(static_cast<unsigned long>(p), d);
    }
    return std::nullopt;
}

Integer integer_from_log(long double L)
{
    // Smallest integer >= exp(L), allowing a little slack upward.
    if (L < 40.0L)
        return Integer(static_cast<unsigned long>(std::ceil(std::exp(L) * (1.0L + 1e-15L))));
    if (L > 11000.0L)
        throw Error(ErrorKind::LevelBudgetExceeded, "quotient too large to represent");
    int e = 0;
    long double m = std::frexp(std::exp(L), &e);
    auto top = static_cast<unsigned long long>(std::ldexp(m, 64));
    Integer v;
    mpz_import(v.get_mpz_t(), 1, 1, sizeof top, 0, 0, &top);
    if (e >= 64)
        v <<= static_cast<mp_bitcnt_t>(e - 64);
    else
        v >>= static_cast<mp_bitcnt_t>(64 - e);
    // The mantissa carries about 64 bits; widen by one part in 1e15 to stay above exp(L).
    v += v / Integer("1000000000000000") + 1;
    return v;
}

std::vector<Integer> ladder(const std::vector<Integer>& a)
{
    std::vector<Integer> q;
    Integer prev = 0, cur = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i == 0) {
            q.push_back(cur);
            continue;
        }
        Integer next = a[i] * cur + prev;
        prev = cur;
        cur = next;
        q.push_back(cur);
    }
    return q;
}

void check_seed(const std::vector<Integer>& seed)
{
    if (seed.empty())
        throw Error(ErrorKind::EmptyQuotients, "seed prefix must contain a_0");
    for (std::size_t i = 1; i < seed.size(); ++i)
        if (sgn(seed[i]) <= 0)
            throw Error(ErrorKind::NonPositiveQuotient, "seed quotients must be positive",
                        static_cast<std::int64_t>(i));
}

}  // namespace

Integer ceil_power(const Integer& q, double nu)
{
    if (auto r = small_ratio(nu); r && mpz_sizeinbase(q.get_mpz_t(), 2) * r->first < 8'000'000) {
        Integer big;
        mpz_pow_ui(big.get_mpz_t(), q.get_mpz_t(), r->first);
        Integer root;
        mpz_root(root.get_mpz_t(), big.get_mpz_t(), r->second);
        Integer back;
        mpz_pow_ui(back.get_mpz_t(), root.get_mpz_t(), r->second);
        if (back < big)
            root += 1;
        return root;
    }
    return integer_from_log(static_cast<long double>(nu) * log_of(q));
}

bool power_at_least(const Integer& a, const Integer& q, double nu)
{
    if (auto r = small_ratio(nu); r && mpz_sizeinbase(q.get_mpz_t(), 2) * r->first < 8'000'000) {
        Integer lhs, rhs;
        mpz_pow_ui(lhs.get_mpz_t(), a.get_mpz_t(), r->second);
        mpz_pow_ui(rhs.get_mpz_t(), q.get_mpz_t(), r->first);
        return lhs >= rhs;
    }
    return log_of(a) >= static_cast<long double>(nu) * log_of(q);
}

RegimeCertificate w_membership(const Angle& angle, double nu, std::int64_t k, int depth)
{
    if (!(nu > 0.0))
        throw Error(ErrorKind::InvalidArgument, "nu must be positive");
    if (k < 1)
        throw Error(ErrorKind::InvalidArgument, "k must be positive");
    RegimeCertificate c;
    c.kind = "W-membership";
    c.depth = scan_depth(angle, depth);
    if (k == 1)
        c.notes.push_back("k = 1: the gcd condition is always satisfied");
    c.notes.push_back("levels with q_n = 1 are not scanned");
    Integer K = to_integer(k);
    for (int n = 0; n <= c.depth; ++n) {
        const Integer& q = angle.q(n);
        if (q < 2)
            continue;
        Integer g;
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), K.get_mpz_t());
        if (g != 1 || !power_at_least(angle.a(n + 1), q, nu))
            continue;
        c.witnesses.push_back({n, true, int_text(angle.a(n + 1)),
                               "ceil(q_n^nu) = " + int_text(ceil_power(q, nu))});
    }
    return c;
}

Integer pqk_index(const Integer& a, const Integer& b, const Integer& c)
{
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    if (g != 1)
        throw Error(ErrorKind::InvalidArgument, "a and b must be coprime");
    if (sgn(c) <= 0)
        throw Error(ErrorKind::InvalidArgument, "c must be positive");
    Integer i = 1, rest = c;
    for (Integer p = 2; p * p <= rest; ++p) {
        if (rest % p != 0)
            continue;
        while (rest % p == 0)
            rest /= p;
        if (a % p != 0)
            i *= p;
    }
    if (rest > 1 && a % rest != 0)
        i *= rest;
    Integer v = a + i * b;
    mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), c.get_mpz_t());
    if (g != 1)
        throw Error(ErrorKind::InvariantBroken, "pqk index does not give a coprime value");
    return i;
}

Angle construct_w_angle(double nu, std::int64_t k, const std::vector<Integer>& seed_prefix,
                        int levels)
{
    if (!(nu > 0.0))
        throw Error(ErrorKind::InvalidArgument, "nu must be positive");
    if (k < 2)
        throw Error(ErrorKind::InvalidArgument, "k must be at least 2");
    if (levels < 1)
        throw Error(ErrorKind::InvalidArgument, "levels must be positive");
    check_seed(seed_prefix);
    std::vector<Integer> a = seed_prefix;
    Integer K = to_integer(k);
    for (int step = 0; step < levels; ++step) {
        std::vector<Integer> q = ladder(a);
        Integer q_prev = q.size() >= 2 ? q[q.size() - 2] : Integer(0);
        Integer q_cur = q.back();
        Integer i = pqk_index(q_prev, q_cur, K);
        a.push_back(i);
        Integer q_new = i * q_cur + q_prev;
        a.push_back(ceil_power(q_new, nu));
    }
    a.push_back(2);
    a.push_back(2);
    return Angle::from_quotients(a);
}

RegimeCertificate liouville_witnesses(const Angle& angle, int k, int depth)
{
    if (k < 0)
        throw Error(ErrorKind::InvalidArgument, "k must be nonnegative");
    RegimeCertificate c;
    c.kind = "liouville";
    c.depth = scan_depth(angle, depth);
    if (k == 0)
        c.notes.push_back("k = 0 reads a_{n+1} > 1");
    for (int n = 0; n <= c.depth; ++n) {
        Integer rhs;
        mpz_pow_ui(rhs.get_mpz_t(), angle.q(n).get_mpz_t(), static_cast<unsigned long>(k));
        if (angle.a(n + 1) > rhs)
            c.witnesses.push_back({n, true, int_text(angle.a(n + 1)), int_text(rhs)});
    }
    return c;
}

std::vector<long double> khinchin_levy_partial(const Angle& angle, int depth)
{
    int d = scan_depth(angle, depth);
    std::vector<long double> sums(static_cast<std::size_t>(std::max(d, 0) + 1), 0.0L);
    long double total = 0.0L;
    for (int n = 1; n <= d; ++n) {
        if (angle.a(n) >= 2 && angle.a(n + 1) >= 2)
            total += 1.0L / log_of(angle.q(n));
        sums[static_cast<std::size_t>(n)] = total;
    }
    return sums;
}

RegimeCertificate growth_check(const Angle& angle, double C, double gamma, int depth)
{
    if (!(C > 0.0) || !(gamma > 0.0))
        throw Error(ErrorKind::InvalidArgument, "C and gamma must be positive");
    RegimeCertificate c;
    c.kind = "rapid-growth";
    c.depth = scan_depth(angle, depth);
    c.notes.push_back("every level is listed; holds marks q_n >= C exp(n^{2+gamma})");
    for (int n = 0; n <= c.depth; ++n) {
        long double rhs_log = std::log(static_cast<long double>(C)) +
                              std::pow(static_cast<long double>(n), 2.0L + gamma);
        long double lhs_log = log_of(angle.q(n));
        char buf[64];
        std::snprintf(buf, sizeof buf, "log rhs = %.12Lg", rhs_log);
        c.witnesses.push_back({n, lhs_log >= rhs_log, int_text(angle.q(n)), buf});
    }
    return c;
}

Angle construct_rapid_growth_angle(double C, double gamma, int levels,
                                   const std::vector<Integer>& seed_prefix)
{
    if (levels > 8)
        throw Error(ErrorKind::LevelBudgetExceeded, "at most 8 constructed levels");
    if (!(C > 0.0) || !(gamma > 0.0))
        throw Error(ErrorKind::InvalidArgument, "C and gamma must be positive");
    if (levels < 1)
        throw Error(ErrorKind::InvalidArgument, "levels must be positive");
    check_seed(seed_prefix);
    std::vector<Integer> a = seed_prefix;
    for (int step = 0; step < levels; ++step) {
        std::vector<Integer> q = ladder(a);
        int m = static_cast<int>(a.size()) - 1;
        long double L = std::log(static_cast<long double>(C)) +
                        std::pow(static_cast<long double>(m + 1), 2.0L + gamma) - log_of(q.back());
        Integer next = L < -40.0L ? Integer(1) : integer_from_log(L);
        a.push_back(next + 1);
    }
    a.push_back(2);
    a.push_back(2);
    return Angle::from_quotients(a);
}

InvLogSums sum_inv_log_a(const Angle& angle, int depth)
{
    InvLogSums s;
    int d = std::min(depth, angle.depth());
    long double total = 0.0L;
    for (int n = 1; n <= d; ++n) {
        if (angle.a(n) == 1)
            s.flagged.push_back(n);
        else
            total += 1.0L / log_of(angle.a(n));
        s.partial.push_back(total);
    }
    s.divergent = !s.flagged.empty();
    return s;
}

std::optional<std::int64_t> same_orbit_detect(const Angle& angle, const Rational& p0,
                                              const Rational& q0, std::int64_t K)
{
    if (K < 1)
        throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
    Rational d = frac(q0 - p0);
    const Integer& Q = angle.value().get_den();
    Integer P = angle.value().get_num() % Q;
    Rational scaled = d * Q;
    if (scaled.get_den() != 1)
        return std::nullopt;
    Integer t = scaled.get_num();
    if (sgn(t) == 0)
        return 0;
    Integer pos = 0, neg = 0;
    Integer negP = (Q - P) % Q;
    for (std::int64_t j = 1; j <= K; ++j) {
        pos += P;
        if (pos >= Q)
            pos -= Q;
        neg += negP;
        if (neg >= Q)
            neg -= Q;
        if (pos == t)
            return j;
        if (neg == t)
            return -j;
    }
    return std::nullopt;
}

Rational generic_beta(const Angle& angle, int n, const Integer& b)
{
    angle.require_level(n, "recipe level");
    const Integer& q = angle.q(n);
    return frac(ratio(2 * b + 1, 2 * q));
}

const char* to_string(Regime regime)
{
    switch (regime) {
    case Regime::Historic: return "historic";
    case Regime::ExtremeHistoric: return "extreme-historic";
    case Regime::PhysicalMeasure: return "physical-measure";
    case Regime::NoTheorem: return "no-theorem-applies";
    }
    return "?";
}

RegimeVerdict regime_verdict(const Angle& angle, const FlowParams& params, int depth,
                             const VerdictOptions& options)
{
    SectionData sec = section_setup(params);
    const Rational& beta = sec.beta;
    RegimeVerdict v;
    v.depth = scan_depth(angle, depth);
    const int d = v.depth;

    auto orbit = same_orbit_detect(angle, sec.p0, sec.q0, options.orbit_horizon);
    if (orbit) {
        RegimeCertificate c;
        c.kind = "same-orbit";
        c.depth = d;
        c.witnesses.push_back({static_cast<int>(*orbit), true, "q0 - p0", "j alpha"});
        v.certificates.push_back(c);
    }

    RegimeCertificate growth = growth_check(angle, options.growth_C, options.growth_gamma, d);
    bool growth_ok = d >= 1 && std::all_of(growth.witnesses.begin() + 1, growth.witnesses.end(),
                                           [](const Witness& w) { return w.holds; });
    if (growth_ok)
        v.certificates.push_back(growth);

    std::vector<long double> kl = khinchin_levy_partial(angle, d);
    int qualifying = 0;
    for (int n = 1; n <= d; ++n)
        qualifying += angle.a(n) >= 2 && angle.a(n + 1) >= 2;
    bool kl_ok = d >= 2 && 2 * qualifying >= d && kl.back() >= 1.0L;
    if (kl_ok) {
        RegimeCertificate c;
        c.kind = "khinchin-levy-divergence";
        c.depth = d;
        for (int n = 1; n <= d; ++n)
            if (angle.a(n) >= 2 && angle.a(n + 1) >= 2)
                c.witnesses.push_back({n, true, int_text(angle.q(n)), "a_n, a_{n+1} >= 2"});
        v.certificates.push_back(c);
    }

    InvLogSums inv = sum_inv_log_a(angle, d);
    bool inv_ok = d >= 3 && std::none_of(inv.flagged.begin(), inv.flagged.end(),
                                         [](int n) { return n >= 2; }) &&
                  1.0L / log_of(angle.a(d)) <= 1.0L / d;

    bool beta0_ok = false;
    if (d >= 2) {
        Beta0Partial b0 = beta0_partial(angle, d - 1);
        beta0_ok = circle_norm(beta + b0.value) <= b0.tail_bound;
        if (beta0_ok) {
            RegimeCertificate c;
            c.kind = "beta0-offset";
            c.depth = d;
            c.witnesses.push_back({d - 1, true, to_decimal(circle_norm(beta + b0.value)),
                                   to_decimal(b0.tail_bound)});
            v.certificates.push_back(c);
        }
    }

    bool w_ok = false;
    const Integer& bden = beta.get_den();
    if (bden >= 2 && bden <= 1'000'000 && bden < angle.value().get_den()) {
        RegimeCertificate w = w_membership(angle, options.nu, to_int64(bden), d);
        // Infinitely many levels are asked for; a lone early witness is not counted as evidence.
        w_ok = w.witnesses.size() >= 2 && 2 * w.witnesses.back().n >= d;
        if (w_ok)
            v.certificates.push_back(w);
    }

    bool liouville_mid = false;
    RegimeCertificate lv = liouville_witnesses(angle, options.liouville_k, d);
    for (const Witness& w : lv.witnesses) {
        Rational t = 2 * angle.q(w.n) * beta;
        if (t.get_den() == 1 && mpz_odd_p(t.get_num().get_mpz_t())) {
            liouville_mid = true;
            break;
        }
    }
    if (liouville_mid)
        v.certificates.push_back(lv);

    struct Match {
        Regime regime;
        const char* pomega;
        const char* basis;
    };
    std::vector<Match> matches;
    if (orbit && growth_ok)
        matches.push_back({Regime::PhysicalMeasure, "{mu_inf}", "same orbit + rapid growth of q_n"});
    if (beta0_ok && (growth_ok || inv_ok))
        matches.push_back({Regime::PhysicalMeasure, "{mu_inf}",
                           "beta = -beta0 + rapid growth or summable 1/log a_n"});
    if (orbit && kl_ok)
        matches.push_back({Regime::Historic, "[mu_inf, delta_p]",
                           "same orbit + divergent sum of 1/log q_n over a_n, a_{n+1} >= 2"});
    if (w_ok)
        matches.push_back({Regime::ExtremeHistoric, "[delta_p, delta_q]",
                           "rational beta + W(nu, b) witnesses"});
    if (liouville_mid)
        matches.push_back({Regime::ExtremeHistoric, "[delta_p, delta_q]",
                           "Liouville witnesses + midpoint beta recipe"});

    if (matches.empty()) {
        v.regime = Regime::NoTheorem;
        v.predicted_pomega = "unknown";
        v.basis = "no hypothesis set has evidence";
        return v;
    }
    v.regime = matches.front().regime;
    v.predicted_pomega = matches.front().pomega;
    v.basis = matches.front().basis;
    for (std::size_t i = 1; i < matches.size(); ++i) {
        if (matches[i].regime != v.regime)
            v.conflicts.push_back(std::string(to_string(matches[i].regime)) + ": " +
                                  matches[i].basis);
    }
    if (options.strict && !v.conflicts.empty()) {
        std::string all = std::string(to_string(v.regime)) + ": " + v.basis;
        for (const auto& c : v.conflicts)
            all += " | " + c;
        throw Error(ErrorKind::ConflictingCertificates, all);
    }
    return v;
}

}  // namespace toruslab
