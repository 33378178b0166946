#pragma once

// Small, deliberately naive reimplementations used as independent references.

#include "toruslab/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace oracle {

using toruslab::Integer;
using toruslab::Rational;

inline Rational cf_value(const std::vector<std::int64_t>& a)
{
    Rational v = 0;
    for (std::size_t i = a.size(); i-- > 1;) {
        v = Rational(a[i]) + v;
        v = 1 / v;
    }
    return v + Rational(a[0]);
}

struct Conv {
    std::vector<Integer> p, q;
};

inline Conv convergents(const std::vector<std::int64_t>& a)
{
    Conv c;
    Integer pm2 = 0, pm1 = 1, qm2 = 1, qm1 = 0;
    for (auto ai : a) {
        Integer p = ai * pm1 + pm2, q = ai * qm1 + qm2;
        c.p.push_back(p);
        c.q.push_back(q);
        pm2 = pm1;
        pm1 = p;
        qm2 = qm1;
        qm1 = q;
    }
    return c;
}

inline Rational norm(const Rational& x)
{
    Rational f = x - Rational(toruslab::floor_of(x));
    return std::min(f, Rational(1 - f));
}

inline Rational birkhoff(const Rational& alpha, const Rational& x, std::int64_t n)
{
    Rational s = 0;
    for (std::int64_t i = 0; i < n; ++i)
        s += 1 / norm(x + Rational(i) * alpha);
    return s;
}

inline std::vector<std::int64_t> repeated(std::int64_t v, int count)
{
    std::vector<std::int64_t> a{0};
    a.insert(a.end(), static_cast<std::size_t>(count), v);
    return a;
}

}  // namespace oracle
