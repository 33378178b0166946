#include "toruslab/interval_union.hpp"

#include "toruslab/error.hpp"

#include <algorithm>

namespace toruslab {

bool Interval::contains(const Rational& x) const
{
    bool above = lo_closed ? x >= lo : x > lo;
    bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

IntervalUnion IntervalUnion::from_arcs(const std::vector<CenteredArc>& arcs)
{
    IntervalUnion u;
    u.arc_count_ = arcs.size();
    std::vector<Interval> pieces;
    pieces.reserve(arcs.size() + 2);
    for (const auto& arc : arcs) {
        if (sgn(arc.half_width) <= 0 || arc.half_width >= Rational(1, 2))
            throw Error(ErrorKind::RangeError, "arc half-width must lie in (0, 1/2)");
        Rational c = frac(arc.center);
        Rational lo = c - arc.half_width;
        Rational hi = c + arc.half_width;
        if (sgn(lo) < 0) {
            pieces.push_back({lo + 1, Rational(1), arc.closed, false});
            pieces.push_back({Rational(0), hi, true, arc.closed});
        } else if (hi > 1) {
            pieces.push_back({lo, Rational(1), arc.closed, false});
            pieces.push_back({Rational(0), hi - 1, true, arc.closed});
        } else if (hi == 1) {
            // The endpoint 1 is the point 0 of the circle.
            pieces.push_back({lo, Rational(1), arc.closed, false});
            if (arc.closed)
                pieces.push_back({Rational(0), Rational(0), true, true});
        } else {
            pieces.push_back({lo, hi, arc.closed, arc.closed});
        }
    }
    std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo)
            return a.lo < b.lo;
        return a.lo_closed && !b.lo_closed;
    });

    for (auto& piece : pieces) {
        if (u.parts_.empty()) {
            u.parts_.push_back(piece);
            continue;
        }
        Interval& last = u.parts_.back();
        if (piece.lo < last.hi) {
            if (piece.hi > piece.lo && last.hi > last.lo)
                u.disjoint_ = false;
            if (piece.hi > last.hi) {
                last.hi = piece.hi;
                last.hi_closed = piece.hi_closed;
            } else if (piece.hi == last.hi) {
                last.hi_closed = last.hi_closed || piece.hi_closed;
            }
        } else if (piece.lo == last.hi && (piece.lo_closed || last.hi_closed)) {
            if (piece.hi >= last.hi) {
                last.hi_closed = piece.hi > last.hi ? piece.hi_closed : (last.hi_closed || piece.hi_closed);
                last.hi = piece.hi;
            }
        } else {
            u.parts_.push_back(piece);
        }
    }
    // Degenerate single points contribute nothing to the measure but are kept for membership.
    u.measure_ = 0;
    for (const auto& p : u.parts_)
        u.measure_ += p.length();
    return u;
}

bool IntervalUnion::contains(const Rational& x) const
{
    Rational y = frac(x);
    auto it = std::upper_bound(parts_.begin(), parts_.end(), y,
                               [](const Rational& v, const Interval& iv) { return v < iv.lo; });
    // Candidates: the interval starting at or before y, and (for equal starts) its neighbour.
    for (int back = 0; back < 2; ++back) {
        if (it == parts_.begin())
            break;
        --it;
        if (it->contains(y))
            return true;
    }
    return false;
}

Rational IntervalUnion::sample_from(double u, double v) const
{
    if (sgn(measure_) == 0)
        throw Error(ErrorKind::RangeError, "cannot sample from a null set");
    Rational target = measure_ * exact_rational(u);
    for (const auto& p : parts_) {
        Rational len = p.length();
        if (target < len || &p == &parts_.back()) {
            Rational offset = len * exact_rational(v);
            Rational x = p.lo + offset;
            if (!p.contains(x))
                x = p.lo + len / 2;
            return frac(x);
        }
        target -= len;
    }
    return parts_.front().lo;
}

}  // namespace toruslab
