#pragma once

#include "toruslab/birkhoff_sums.hpp"
#include "toruslab/bounds.hpp"
#include "toruslab/interval_union.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace toruslab {

// E_{n,l}: union of R^{-k}(-w, w), k < l q_n, with w = lambda^{(n)}/2 (2 lambda^{(n)} if widened).
IntervalUnion build_E(const Angle& angle, int n, std::int64_t ell, bool widened = false);

// Smallest k < count with ||x + k alpha|| < half_width, if any. Exact decision.
std::optional<std::int64_t> first_close_visit(const Angle& angle, const Rational& x,
                                              std::int64_t count, const Rational& half_width);

// Measure of E_{n,l} with disjointness certified by sorting the arc centres exactly.
struct EMeasure {
    Rational measure;
    bool disjoint = false;
};

EMeasure e_measure_certified(const Angle& angle, int n, std::int64_t ell);

// Uniform-by-measure point of E_{n,l}: a uniform arc, then a uniform offset inside it.
template <class Rng>
Rational sample_E(const Angle& angle, int n, std::int64_t ell, Rng& rng, bool widened = false);

struct Schedule {
    std::string name;
    std::function<long double(int)> value;
};

Schedule schedule_power(long double exponent);    // n^e
Schedule schedule_loglog();                        // log log (n + 3)
Schedule schedule_v_default();                     // ceil(log(n + 2))

// a_{n,k}, b_{n,k}, c_{n,k} in long double.
long double bad_a(const Angle& angle, int n, long double k);
long double bad_b(const Angle& angle, int n, long double k);
long double bad_c(const Angle& angle, int n, long double k);

// n(i) = max{n : q_n <= i}, k(i) = floor(i / q_{n(i)}).
std::pair<int, Integer> bad_index(const Angle& angle, const Integer& i);

struct BadSetLevel {
    int n = 0;
    long double u = 0.0L;
    long double v = 0.0L;
    // Sum of the arc lengths; an upper bound for the measure.
    long double union_bound = 0.0L;
    long double tilde_union_bound = 0.0L;
    // Present when the arc count was small enough to build the union exactly.
    std::optional<IntervalUnion> D;
    std::optional<IntervalUnion> D_tilde;
};

BadSetLevel build_bad_sets(const Angle& angle, const Schedule& u, const Schedule& v, int n,
                           std::int64_t exact_limit = 200'000);

struct BadSetLedgerRow {
    int n = 0;
    long double u = 0.0L;
    long double v = 0.0L;
    long double measure = 0.0L;          // exact union measure when built, else the union bound
    bool measure_exact = false;
    long double partial_sum = 0.0L;      // sum of measures up to n
    long double v_weighted_partial = 0.0L;
    long double v_next_over_u = 0.0L;
};

std::vector<BadSetLedgerRow> bad_set_ledger(const Angle& angle, const Schedule& u,
                                            const Schedule& v, int n_lo, int n_hi,
                                            std::int64_t exact_limit = 200'000);

// psi(R^i x) <= (8/u_n) S_i(x'), under x not in D_n, q_n <= i < q_{n+1}, ||x - x'|| <= lambda^{(n)}.
BoundCheck bad_set_escape_check(const Angle& angle, const Schedule& u, int n, const Rational& x,
                                std::int64_t i, const Rational& x_prime,
                                std::optional<Mode> mode = {});

// x in D_n, decided exactly without building the union.
bool in_bad_set(const Angle& angle, const Schedule& u, int n, const Rational& x);

// Partial sums of sum_{n=1}^{N} (q_n - q_{n-1}) min(phi(n), lambda^{(n-1)}).
std::vector<long double> escape_series(const Angle& angle,
                                          const std::function<long double(int)>& phi, int N);

// phi(n) = eps_n / (q_n log 3 q_n) with eps_n = 1/log n on levels with a_n, a_{n+1} >= 2, n >= 2.
std::function<long double(int)> divergence_phi(const Angle& angle);

template <class Rng>
Rational sample_E(const Angle& angle, int n, std::int64_t ell, Rng& rng, bool widened)
{
    std::int64_t count = ell * to_int64(angle.q(n));
    std::uniform_int_distribution<std::int64_t> pick(0, count - 1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::int64_t k = pick(rng);
    double t;
    do {
        t = U(rng);
    } while (t <= -1.0 || t >= 1.0);
    Rational w = widened ? Rational(angle.lambda(n) * 2) : Rational(angle.lambda(n) / 2);
    Rational offset = w * exact_rational(t);
    return frac(offset - Rational(to_integer(k)) * angle.value());
}

}  // namespace toruslab
