#pragma once

// Functions of the (quasi) shift-invariant space: f = sum_g c_g G(. - g),
// with truncation certificates, grid norms and the Bessel-type bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sisamp/common.hpp"
#include "sisamp/generator.hpp"
#include "sisamp/sets.hpp"
#include "sisamp/spectral.hpp"

namespace sisamp {

inline constexpr double synthesis_tail_target = 1e-12;

namespace detail {
/// Smallest rho (past the envelope peak) with 2 c_inf sum_j env(rho + j sep) <= target.
inline double truncation_radius(const DecayEnvelope& env, double sep, double c_inf, double target) {
    if (c_inf == 0.0) return 0.0;
    const double peak = env.kind == DecayEnvelope::Kind::gaussian ? env.slope / env.rate : 0.0;
    auto tail = [&](double r) { return 2.0 * c_inf * env.tail_sum(r, sep); };
    double hi = std::max(1.0, peak);
    while (tail(hi) > target) hi *= 2.0;
    double lo = peak;
    if (tail(lo) <= target) return lo;
    for (int it = 0; it < 80 && hi - lo > 1e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > target ? lo : hi) = mid;
    }
    return hi;
}
}  // namespace detail

/// f(x) = sum over g in Gamma of c(g) G(x - g). Coefficients come from a rule
/// c(g) with a declared sup bound, optionally restricted to a support window
/// (zero outside).
class SISFunction {
public:
    using CoeffRule = std::function<cplx(double)>;

    SISFunction(Generator g, SeparatedSet gamma, CoeffRule coeff, double c_inf,
                std::optional<Interval> support = std::nullopt, std::optional<double> rho = std::nullopt)
        : g_(std::move(g)), gamma_(std::move(gamma)), coeff_(std::move(coeff)), c_inf_(c_inf), support_(support) {
        if (!(c_inf_ >= 0.0)) throw DomainError("coefficient bound must be nonnegative");
        const double sep = gamma_.separation();
        rho_ = rho ? *rho : detail::truncation_radius(g_.decay(), sep, c_inf_, synthesis_tail_target);
        tail_bound_ = c_inf_ == 0.0 ? 0.0 : 2.0 * c_inf_ * g_.decay().tail_sum(rho_, sep);
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (const auto* e = gamma_.as_explicit())
            window_ = {e->window.lo + rho_, e->window.hi - rho_};
        else
            window_ = {-inf, inf};
        if (support_ && gamma_.is_periodic()) window_ = {-inf, inf};
    }

    /// Finitely many coefficients on explicit points (zero elsewhere).
    static SISFunction from_coeffs(Generator g, SeparatedSet gamma, const std::vector<double>& points,
                                   const std::vector<cplx>& coeffs) {
        if (points.size() != coeffs.size()) throw DomainError("points and coefficients differ in length");
        if (points.empty()) throw DomainError("no coefficients given");
        if (!std::is_sorted(points.begin(), points.end())) throw DomainError("coefficient points must be sorted");
        double lo = points.front(), hi = points.front(), cinf = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            lo = std::min(lo, points[i]);
            hi = std::max(hi, points[i]);
            cinf = std::max(cinf, std::abs(coeffs[i]));
        }
        const double tol = 1e-9 * std::max(1.0, gamma.separation());
        auto rule = [points, coeffs, tol](double x) -> cplx {
            const auto it = std::lower_bound(points.begin(), points.end(), x - tol);
            if (it != points.end() && std::abs(*it - x) <= tol)
                return coeffs[static_cast<std::size_t>(it - points.begin())];
            return {};
        };
        return SISFunction(std::move(g), std::move(gamma), rule, cinf, Interval{lo, hi});
    }

    [[nodiscard]] const Generator& generator() const { return g_; }
    [[nodiscard]] const SeparatedSet& gamma() const { return gamma_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] double tail_bound() const { return tail_bound_; }
    [[nodiscard]] Interval eval_window() const { return window_; }

    [[nodiscard]] cplx operator()(double x) const {
        if (x < window_.lo || x > window_.hi)
            throw DomainError("x=" + std::to_string(x) + " lies outside the evaluation window");
        Interval iv{x - rho_, x + rho_};
        if (support_) iv = {std::max(iv.lo, support_->lo), std::min(iv.hi, support_->hi)};
        cplx sum{};
        if (iv.hi < iv.lo) return sum;
        for (double gpt : gamma_.points_in(iv)) {
            const cplx c = coeff_(gpt);
            if (c != cplx{}) sum += c * g_(x - gpt);
        }
        return sum;
    }

private:
    Generator g_;
    SeparatedSet gamma_;
    CoeffRule coeff_;
    double c_inf_ = 0.0;
    std::optional<Interval> support_;
    double rho_ = 0.0;
    double tail_bound_ = 0.0;
    Interval window_;
};

inline cplx synthesize(const SISFunction& f, double x) { return f(x); }

/// Norm of a sampled function on a uniform grid of step 1/64 over iv.
/// p = 0 stands for p = infinity.
template <class F>
double grid_norm(F&& f, Interval iv, int p) {
    constexpr double h = 1.0 / 64.0;
    const auto n = static_cast<std::size_t>(std::ceil(iv.length() / h));
    const double step = iv.length() / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double v = std::abs(f(iv.lo + static_cast<double>(k) * step));
        if (p == 0) {
            acc = std::max(acc, v);
            continue;
        }
        const double w = (k == 0 || k == n) ? 0.5 * step : step;
        acc += w * (p == 1 ? v : v * v);
    }
    if (p == 2) return std::sqrt(acc);
    return acc;
}

struct BesselReport {
    int p = 2;  ///< 0 stands for infinity
    int trials = 0;
    int covering = 0;
    double wiener = 0.0;
    double bound = 0.0;      ///< N^{1/q'} ||G||_W
    double max_ratio = 0.0;  ///< max ||f||_p / ||c||_p
    double slack = 0.01;
    bool passed = false;
};

/// Random coefficient vectors on Gamma cap [-radius, radius]; checks
/// ||f||_p <= N(Gamma)^{1/q'} ||G||_W ||c||_p up to the grid-norm slack.
inline BesselReport bessel_bound_check(const Generator& g, const SeparatedSet& gamma, int trials, int p,
                                       std::uint64_t seed = 1, double radius = 10.0) {
    if (p != 0 && p != 1 && p != 2) throw DomainError("p must be 1, 2 or infinity");
    if (trials < 1) throw DomainError("trials must be positive");
    BesselReport rep;
    rep.p = p;
    rep.trials = trials;
    rep.covering = covering_constant(gamma);
    rep.wiener = wiener_norm(g);
    const double inv_qprime = p == 0 ? 1.0 : (p == 1 ? 0.0 : 0.5);
    rep.bound = std::pow(static_cast<double>(rep.covering), inv_qprime) * rep.wiener;

    const auto pts = gamma.points_in({-radius, radius});
    if (pts.empty()) throw DomainError("no Gamma points in the trial window");
    const double ext = g.decay().radius(1e-16 * g.decay().amp);
    const Interval iv{pts.front() - ext, pts.back() + ext};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        std::vector<cplx> c(pts.size());
        for (auto& v : c) v = {U(rng), U(rng)};
        double cn = 0.0;
        for (const auto& v : c) {
            const double a = std::abs(v);
            cn = p == 0 ? std::max(cn, a) : cn + (p == 1 ? a : a * a);
        }
        if (p == 2) cn = std::sqrt(cn);
        auto f = [&](double x) {
            cplx s{};
            for (std::size_t i = 0; i < pts.size(); ++i) s += c[i] * g(x - pts[i]);
            return s;
        };
        rep.max_ratio = std::max(rep.max_ratio, grid_norm(f, iv, p) / cn);
    }
    rep.passed = rep.max_ratio <= rep.bound * (1.0 + rep.slack);
    return rep;
}

}  // namespace sisamp
