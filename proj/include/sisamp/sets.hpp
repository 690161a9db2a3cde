#pragma once

// Separated point sets on the line: periodic patterns and explicit windowed
// lists, Beurling densities, covering constants, and set transforms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "sisamp/common.hpp"

namespace sisamp {

/// offsets + period * Z, offsets sorted in [0, period).
struct PeriodicPattern {
    std::vector<double> offsets;
    double period = 1.0;
};

/// A finite list of sorted points known only inside `window`.
struct ExplicitPoints {
    std::vector<double> points;
    Interval window;
};

namespace detail {
inline double inclusion_tol(double a, double b) {
    return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}
}  // namespace detail

class SeparatedSet {
public:
    static SeparatedSet periodic(std::vector<double> offsets, double period) {
        if (!(period > 0.0) || !std::isfinite(period))
            throw DomainError("periodic set needs a positive period");
        if (offsets.empty()) throw DomainError("periodic set needs at least one offset");
        for (double& o : offsets) {
            o -= period * std::floor(o / period);
            if (o >= period * (1.0 - 1e-14)) o = 0.0;
        }
        std::sort(offsets.begin(), offsets.end());
        double sep = offsets.front() + period - offsets.back();
        for (std::size_t i = 1; i < offsets.size(); ++i) sep = std::min(sep, offsets[i] - offsets[i - 1]);
        if (!(sep > 1e-12 * period)) throw DomainError("periodic set is not separated (repeated offset)");
        SeparatedSet s;
        s.repr_ = PeriodicPattern{std::move(offsets), period};
        s.separation_ = sep;
        return s;
    }

    static SeparatedSet explicit_points(std::vector<double> points, Interval window) {
        if (!(window.hi > window.lo)) throw DomainError("explicit set needs a non-degenerate window");
        std::sort(points.begin(), points.end());
        const double tol = detail::inclusion_tol(window.lo, window.hi);
        for (double p : points)
            if (p < window.lo - tol || p > window.hi + tol)
                throw DomainError("explicit point " + std::to_string(p) + " lies outside its window");
        double sep = window.length();
        for (std::size_t i = 1; i < points.size(); ++i) sep = std::min(sep, points[i] - points[i - 1]);
        if (!(sep > 0.0)) throw DomainError("explicit set is not separated (repeated point)");
        SeparatedSet s;
        s.repr_ = ExplicitPoints{std::move(points), window};
        s.separation_ = sep;
        return s;
    }

    /// step * Z + shift.
    static SeparatedSet lattice(double step, double shift = 0.0) { return periodic({shift}, step); }
    static SeparatedSet integers() { return lattice(1.0); }

    [[nodiscard]] bool is_periodic() const { return std::holds_alternative<PeriodicPattern>(repr_); }
    [[nodiscard]] const PeriodicPattern* as_periodic() const { return std::get_if<PeriodicPattern>(&repr_); }
    [[nodiscard]] const ExplicitPoints* as_explicit() const { return std::get_if<ExplicitPoints>(&repr_); }
    [[nodiscard]] double separation() const { return separation_; }

    /// True for the integer lattice up to a shift.
    [[nodiscard]] bool is_integer_lattice() const {
        const auto* p = as_periodic();
        return p && p->offsets.size() == 1 && std::abs(p->period - 1.0) < 1e-14;
    }

    /// Points in the closed interval [iv.lo, iv.hi] (sorted). For explicit
    /// sets only the known points are returned.
    [[nodiscard]] std::vector<double> points_in(Interval iv) const {
        const double tol = detail::inclusion_tol(iv.lo, iv.hi);
        std::vector<double> out;
        if (const auto* p = as_periodic()) {
            const double T = p->period;
            const auto m0 = static_cast<long long>(std::floor((iv.lo - tol) / T)) - 1;
            const auto m1 = static_cast<long long>(std::ceil((iv.hi + tol) / T)) + 1;
            for (long long m = m0; m <= m1; ++m)
                for (double o : p->offsets) {
                    const double x = o + static_cast<double>(m) * T;
                    if (x >= iv.lo - tol && x <= iv.hi + tol) out.push_back(x);
                }
        } else {
            for (double x : as_explicit()->points)
                if (x >= iv.lo - tol && x <= iv.hi + tol) out.push_back(x);
        }
        return out;
    }

    [[nodiscard]] std::size_t count_in(Interval iv) const { return points_in(iv).size(); }

private:
    SeparatedSet() = default;
    std::variant<PeriodicPattern, ExplicitPoints> repr_;
    double separation_ = 0.0;
};

struct DensityReport {
    double d_minus = 0.0;
    double d_plus = 0.0;
    bool exact = true;
    std::optional<double> radius;  ///< window radius used for explicit sets
};

/// Lower and upper uniform densities. Periodic sets: exact, #offsets/period.
/// Explicit sets: extremes of #(S cap [x-R, x+R])/(2R) over centres x whose
/// interval fits the window. The count is piecewise constant in x with
/// breaks at s +- R, so breakpoints and the midpoints between them are
/// enough to find both extremes exactly.
inline DensityReport beurling_densities(const SeparatedSet& s, std::optional<double> R = std::nullopt) {
    if (const auto* p = s.as_periodic()) {
        const double d = static_cast<double>(p->offsets.size()) / p->period;
        return {d, d, true, std::nullopt};
    }
    const auto* e = s.as_explicit();
    if (!R || !(*R > 0.0)) throw DomainError("explicit set densities need a positive radius R");
    const double r = *R;
    if (2.0 * r > e->window.length() * (1.0 + 1e-12))
        throw DomainError("radius R exceeds half the window length");
    const double lo = e->window.lo + r;
    const double hi = std::max(lo, e->window.hi - r);
    std::vector<double> breaks{lo, hi};
    for (double x : e->points)
        for (double c : {x - r, x + r})
            if (c > lo && c < hi) breaks.push_back(c);
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> centres = breaks;
    for (std::size_t i = 1; i < breaks.size(); ++i) centres.push_back(0.5 * (breaks[i - 1] + breaks[i]));
    const auto& pts = e->points;
    double cmin = std::numeric_limits<double>::infinity();
    double cmax = 0.0;
    for (double c : centres) {
        // Exact closed-interval count on the stored points (no tolerance).
        const auto first = std::lower_bound(pts.begin(), pts.end(), c - r);
        const auto last = std::upper_bound(pts.begin(), pts.end(), c + r);
        const auto n = static_cast<double>(last - first);
        cmin = std::min(cmin, n);
        cmax = std::max(cmax, n);
    }
    return {cmin / (2.0 * r), cmax / (2.0 * r), false, r};
}

/// N(S) = sup_x #(S cap [x, x+1]). The supremum is reached with a point of S
/// on the left end, so one period of candidates suffices.
inline int covering_constant(const SeparatedSet& s) {
    std::vector<double> starts;
    if (const auto* p = s.as_periodic())
        starts = p->offsets;
    else
        starts = s.as_explicit()->points;
    std::size_t best = 0;
    for (double x : starts) best = std::max(best, s.count_in({x, x + 1.0}));
    return static_cast<int>(best);
}

inline SeparatedSet translate(const SeparatedSet& s, double delta) {
    if (const auto* p = s.as_periodic()) {
        auto o = p->offsets;
        for (double& x : o) x += delta;
        return SeparatedSet::periodic(std::move(o), p->period);
    }
    const auto* e = s.as_explicit();
    auto pts = e->points;
    for (double& x : pts) x += delta;
    return SeparatedSet::explicit_points(std::move(pts), {e->window.lo + delta, e->window.hi + delta});
}

inline SeparatedSet scale(const SeparatedSet& s, double a) {
    if (!(a > 0.0)) throw DomainError("scale factor must be positive");
    if (const auto* p = s.as_periodic()) {
        auto o = p->offsets;
        for (double& x : o) x *= a;
        return SeparatedSet::periodic(std::move(o), p->period * a);
    }
    const auto* e = s.as_explicit();
    auto pts = e->points;
    for (double& x : pts) x *= a;
    return SeparatedSet::explicit_points(std::move(pts), {e->window.lo * a, e->window.hi * a});
}

/// Restriction to a closed window, as an explicit set.
inline SeparatedSet restrict_to(const SeparatedSet& s, Interval window) {
    auto pts = s.points_in(window);
    if (pts.size() < 2) throw DomainError("restriction leaves fewer than two points");
    for (double& x : pts) x = std::clamp(x, window.lo, window.hi);
    return SeparatedSet::explicit_points(std::move(pts), window);
}

/// The same periodic set described with period m * T.
inline SeparatedSet repeat_period(const SeparatedSet& s, int m) {
    const auto* p = s.as_periodic();
    if (!p || m < 1) throw DomainError("repeat_period needs a periodic set and m >= 1");
    std::vector<double> o;
    for (int j = 0; j < m; ++j)
        for (double x : p->offsets) o.push_back(x + j * p->period);
    return SeparatedSet::periodic(std::move(o), p->period * m);
}

/// Union of two periodic sets with the same period.
inline SeparatedSet unite(const SeparatedSet& a, const SeparatedSet& b) {
    const auto* pa = a.as_periodic();
    const auto* pb = b.as_periodic();
    if (!pa || !pb || std::abs(pa->period - pb->period) > 1e-12 * pa->period)
        throw DomainError("unite needs periodic sets with equal periods");
    auto o = pa->offsets;
    o.insert(o.end(), pb->offsets.begin(), pb->offsets.end());
    return SeparatedSet::periodic(std::move(o), pa->period);
}

}  // namespace sisamp
