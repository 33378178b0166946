#pragma once

#include "toruslab/rational.hpp"

#include <random>
#include <vector>

namespace toruslab {

// Interval inside [0,1] with explicit endpoint closedness.
struct Interval {
    Rational lo;
    Rational hi;
    bool lo_closed = true;
    bool hi_closed = false;

    Rational length() const { return hi - lo; }
    bool contains(const Rational& x) const;
};

// Symmetric arc center +- half_width on the circle.
struct CenteredArc {
    Rational center;
    Rational half_width;
    bool closed = false;
};

// Finite union of circle arcs, stored as sorted disjoint intervals of [0,1).
class IntervalUnion {
public:
    IntervalUnion() = default;

    // half_width must be positive and below 1/2.
    static IntervalUnion from_arcs(const std::vector<CenteredArc>& arcs);

    const std::vector<Interval>& intervals() const { return parts_; }
    const Rational& measure() const { return measure_; }
    bool contains(const Rational& x) const;
    // True when the generating arcs had pairwise disjoint interiors.
    bool arcs_disjoint() const { return disjoint_; }
    std::size_t arc_count() const { return arc_count_; }

    // Uniform point with respect to Lebesgue measure restricted to the union.
    template <class Rng>
    Rational sample(Rng& rng) const;

private:
    Rational sample_from(double u, double v) const;

    std::vector<Interval> parts_;
    Rational measure_ = 0;
    bool disjoint_ = true;
    std::size_t arc_count_ = 0;
};

template <class Rng>
Rational IntervalUnion::sample(Rng& rng) const
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double u = U(rng);
    double v = U(rng);
    return sample_from(u, v);
}

}  // namespace toruslab
