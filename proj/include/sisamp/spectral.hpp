#pragma once

// Fourier transforms of generators, periodized spectra, the Z-shift
// stability screen and the pole-collision conditions.
//
// Convention: g^(t) = int e^{-2 pi i x t} G(x) dx.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sisamp/common.hpp"
#include "sisamp/generator.hpp"
#include "sisamp/sets.hpp"

namespace sisamp {

enum class SpectrumMethod { residue, quadrature };

inline std::string to_string(SpectrumMethod m) { return m == SpectrumMethod::residue ? "residue" : "quadrature"; }

struct SpectrumSample {
    double t = 0.0;
    cplx value;
    SpectrumMethod method = SpectrumMethod::quadrature;
    double err_est = 0.0;
};

inline constexpr double residue_t_min = 1e-3;
inline constexpr double quadrature_tol = 1e-13;

/// Transform evaluator for one generator. Residue data is precomputed at
/// construction; trapezoid samples are built lazily, one refinement level at a
/// time, and shared between calls. Safe to call concurrently.
class Spectrum {
public:
    explicit Spectrum(Generator g) : g_(std::move(g)), cache_(std::make_shared<Cache>()) {
        if (g_.cls() == GeneratorClass::K) prepare_residues();
        const DecayEnvelope& env = g_.decay();
        double X = env.kind == DecayEnvelope::Kind::exponential ? env.radius(5e-16 * env.rate)
                                                               : env.radius(1e-17) + 1.0;
        X = std::max(X, 4.0);
        cache_->h0 = 0.5;
        cache_->n0 = static_cast<std::size_t>(std::ceil(X / cache_->h0)) * 2;
        cache_->X = 0.5 * static_cast<double>(cache_->n0) * cache_->h0;
    }

    [[nodiscard]] const Generator& generator() const { return g_; }
    [[nodiscard]] double quadrature_radius() const { return cache_->X; }

    /// Residue method for class K away from t = 0, quadrature otherwise.
    [[nodiscard]] SpectrumSample operator()(double t) const {
        if (g_.cls() == GeneratorClass::K && std::abs(t) >= residue_t_min) return by_residue(t);
        return by_quadrature(t);
    }

    [[nodiscard]] SpectrumSample by_residue(double t) const {
        if (g_.cls() != GeneratorClass::K) throw DomainError("residue transform needs a class K generator");
        if (t == 0.0) throw DomainError("residue transform is singular at t = 0");
        const double alpha = g_.alpha();
        const cplx s{0.0, -two_pi * t / alpha};
        // 2 pi i s is the real number 4 pi^2 t / alpha. For t > 0 the factor
        // e^{-2 pi i s} is folded into every term so nothing overflows.
        const double two_pi_i_s = 2.0 * two_pi * pi * t / alpha;
        const bool fold = t > 0.0;
        cplx sum{};
        double mag = 0.0;
        for (const auto& pt : terms_) {
            cplx poly{};
            // binom(s-1, j) for j = 0..m-1, built up incrementally.
            cplx binom{1.0, 0.0};
            std::vector<cplx> binoms(static_cast<std::size_t>(pt.order));
            for (int j = 0; j < pt.order; ++j) {
                binoms[static_cast<std::size_t>(j)] = binom;
                binom *= (s - 1.0 - static_cast<double>(j)) / static_cast<double>(j + 1);
            }
            for (int k = 0; k < pt.order; ++k) {
                const int j = pt.order - 1 - k;
                poly += pt.taylor[static_cast<std::size_t>(k)] * binoms[static_cast<std::size_t>(j)] *
                        std::exp(-static_cast<double>(j) * pt.log_w);
            }
            cplx expo = (s - 1.0) * pt.log_w;
            if (fold) expo -= two_pi_i_s;
            const cplx term = std::exp(expo) * poly;
            sum += term;
            mag += std::abs(term);
        }
        cplx pref;
        if (fold)
            pref = cplx{0.0, -two_pi} / (1.0 - std::exp(-two_pi_i_s));
        else
            pref = cplx{0.0, two_pi} / (1.0 - std::exp(two_pi_i_s));
        SpectrumSample out;
        out.t = t;
        out.method = SpectrumMethod::residue;
        out.value = pref * sum / alpha;
        out.err_est = 1e-14 * (1.0 + static_cast<double>(terms_.size())) * std::abs(pref) * mag / alpha +
                      std::numeric_limits<double>::min();
        return out;
    }

    /// Composite trapezoid on [-X, X], halving the step until two successive
    /// levels agree to quadrature_tol and the grid resolves frequency t.
    [[nodiscard]] SpectrumSample by_quadrature(double t) const {
        const Cache& c = *cache_;
        constexpr int max_level = 22;
        constexpr double max_points = 1 << 23;
        cplx S{};
        double scale = 0.0;
        auto add_level = [&](int level) {
            auto lv = level_values(level);
            const double h = c.h0 / std::ldexp(1.0, level);
            const double x0 = level == 0 ? -c.X : -c.X + h;
            const double step = level == 0 ? h : 2.0 * h;
            const std::size_t n = lv->size();
            for (std::size_t k = 0; k < n; ++k) {
                double w = 1.0;
                if (level == 0 && (k == 0 || k + 1 == n)) w = 0.5;
                const double x = x0 + static_cast<double>(k) * step;
                S += w * (*lv)[k] * std::polar(1.0, -two_pi * x * t);
                if (level == 0) scale += w * std::abs((*lv)[k]);
            }
        };
        add_level(0);
        cplx prev = c.h0 * S;
        scale *= c.h0;
        const double tol = quadrature_tol * std::max(1.0, scale);
        double diff = std::numeric_limits<double>::infinity();
        for (int L = 1; L <= max_level; ++L) {
            if (static_cast<double>(c.n0) * std::ldexp(1.0, L) > max_points) break;
            add_level(L);
            const double h = c.h0 / std::ldexp(1.0, L);
            const cplx cur = h * S;
            diff = std::abs(cur - prev);
            prev = cur;
            const double prev_inv_h = std::ldexp(1.0, L - 1) / c.h0;
            if (L >= 2 && prev_inv_h >= 2.0 * std::abs(t) + 8.0 && diff <= tol) {
                SpectrumSample out;
                out.t = t;
                out.value = cur;
                out.method = SpectrumMethod::quadrature;
                out.err_est = diff + 1e-14 * std::max(1.0, scale) + 1e-15;
                return out;
            }
        }
        throw ConvergenceError("quadrature transform did not converge at t=" + std::to_string(t) +
                               " (last level difference " + std::to_string(diff) + ")");
    }

private:
    struct PoleTerm {
        cplx log_w;
        int order = 1;
        std::vector<cplx> taylor;  // Taylor coefficients of (u-w)^m R(u) at w
    };

    struct Cache {
        double X = 0.0;
        double h0 = 0.5;
        std::size_t n0 = 0;
        std::mutex mu;
        std::vector<std::shared_ptr<const std::vector<cplx>>> levels;
    };

    void prepare_residues() {
        const RationalFn& r = g_.rational();
        const auto& poles = r.poles();
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const cplx w = poles[i].location;
            const int m = poles[i].order;
            std::vector<cplx> rest_roots;
            for (std::size_t j = 0; j < poles.size(); ++j)
                if (j != i)
                    for (int k = 0; k < poles[j].order; ++k) rest_roots.push_back(poles[j].location);
            const ComplexPoly qw = r.den().leading() * ComplexPoly::from_roots(rest_roots);
            const auto pt = r.num().taylor_at(w, m - 1);
            const auto qt = qw.taylor_at(w, m - 1);
            std::vector<cplx> ct(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k) {
                cplx acc = pt[static_cast<std::size_t>(k)];
                for (int l = 1; l <= k; ++l)
                    acc -= qt[static_cast<std::size_t>(l)] * ct[static_cast<std::size_t>(k - l)];
                ct[static_cast<std::size_t>(k)] = acc / qt[0];
            }
            terms_.push_back({cplx{std::log(std::abs(w)), detail::arg_0_2pi(w)}, m, std::move(ct)});
        }
    }

    [[nodiscard]] std::shared_ptr<const std::vector<cplx>> level_values(int level) const {
        Cache& c = *cache_;
        std::lock_guard lock(c.mu);
        while (static_cast<int>(c.levels.size()) <= level) {
            const int l = static_cast<int>(c.levels.size());
            const double h = c.h0 / std::ldexp(1.0, l);
            std::vector<cplx> v;
            if (l == 0) {
                v.resize(c.n0 + 1);
                for (std::size_t k = 0; k <= c.n0; ++k) v[k] = g_(-c.X + static_cast<double>(k) * h);
            } else {
                const std::size_t n = c.n0 << (l - 1);
                v.resize(n);
                for (std::size_t k = 0; k < n; ++k) v[k] = g_(-c.X + static_cast<double>(2 * k + 1) * h);
            }
            c.levels.push_back(std::make_shared<const std::vector<cplx>>(std::move(v)));
        }
        return c.levels[static_cast<std::size_t>(level)];
    }

    Generator g_;
    std::vector<PoleTerm> terms_;
    std::shared_ptr<Cache> cache_;
};

/// One-shot transform; `force` selects a method explicitly.
inline SpectrumSample fourier_transform(const Generator& g, double t,
                                        std::optional<SpectrumMethod> force = std::nullopt) {
    Spectrum sp(g);
    if (!force) return sp(t);
    return *force == SpectrumMethod::residue ? sp.by_residue(t) : sp.by_quadrature(t);
}

struct PeriodizedFloor {
    double b = 0.0;
    double floor = 0.0;  ///< max_{|n| <= n_max} |g^(n + b)|
    int argmax_n = 0;
    int n_max = 0;
    bool certified = false;  ///< tail values below floor/10
};

inline constexpr int periodized_n_cap = 64;

/// Size of the spectrum on Z + b. A vanishing value means every |g^(n+b)| is
/// zero, so the maximum over n is the quantity that separates the stable and
/// unstable cases. n_max is doubled (up to 64) until the two outermost shells
/// fall below a tenth of the floor.
inline PeriodizedFloor periodized_spectrum(const Spectrum& sp, double b, int n_max = 8) {
    if (n_max < 2) n_max = 2;
    std::vector<double> vals;  // index n + n_max
    int have = -1;
    PeriodizedFloor out;
    out.b = b;
    std::vector<double> cache_pos, cache_neg;  // |g^(n+b)|, |g^(-n+b)|
    auto mag = [&](int n) { return std::abs(sp(static_cast<double>(n) + b).value); };
    while (true) {
        for (int n = have + 1; n <= n_max; ++n) {
            cache_pos.push_back(mag(n));
            cache_neg.push_back(n == 0 ? cache_pos[0] : mag(-n));
        }
        have = n_max;
        double best = -1.0;
        int arg = 0;
        for (int n = 0; n <= n_max; ++n) {
            const auto i = static_cast<std::size_t>(n);
            if (cache_pos[i] > best) best = cache_pos[i], arg = n;
            if (cache_neg[i] > best) best = cache_neg[i], arg = -n;
        }
        double tail = 0.0;
        for (int n : {n_max, n_max - 1}) {
            const auto i = static_cast<std::size_t>(n);
            tail = std::max({tail, cache_pos[i], cache_neg[i]});
        }
        out.floor = best;
        out.argmax_n = arg;
        out.n_max = n_max;
        out.certified = tail < best / 10.0;
        if (out.certified || n_max >= periodized_n_cap) return out;
        n_max = std::min(2 * n_max, periodized_n_cap);
    }
}

inline PeriodizedFloor periodized_spectrum(const Generator& g, double b, int n_max = 8) {
    return periodized_spectrum(Spectrum(g), b, n_max);
}

inline constexpr double stability_eps = 1e-8;

struct StabilityVerdict {
    bool stable = false;
    double margin = 0.0;
    double witness_b = 0.0;
    int grid_size = 0;
    double eps = stability_eps;
    bool tails_certified = true;
    std::string label = "numerical (grid)";
};

/// Grid screen for stability of Z-shifts: the spectrum must not vanish on
/// any coset Z + b. Evaluated at b = j/grid_size.
inline StabilityVerdict stability_check(const Spectrum& sp, int grid_size = 256, unsigned threads = 1,
                                        double eps = stability_eps) {
    if (grid_size < 16) throw DomainError("stability grid needs at least 16 points");
    std::vector<PeriodizedFloor> floors(static_cast<std::size_t>(grid_size));
    parallel_for(floors.size(), threads, [&](std::size_t j) {
        floors[j] = periodized_spectrum(sp, static_cast<double>(j) / grid_size);
    });
    StabilityVerdict v;
    v.grid_size = grid_size;
    v.eps = eps;
    v.margin = std::numeric_limits<double>::infinity();
    for (const auto& f : floors) {
        if (f.floor < v.margin) v.margin = f.floor, v.witness_b = f.b;
        v.tails_certified = v.tails_certified && f.certified;
    }
    v.stable = v.margin > eps;
    return v;
}

inline StabilityVerdict stability_check(const Generator& g, int grid_size = 256, unsigned threads = 1,
                                        double eps = stability_eps) {
    return stability_check(Spectrum(g), grid_size, threads, eps);
}

/// w = w2 * e^{alpha * shift}.
struct PoleCollision {
    cplx w;
    cplx w2;
    double shift = 0.0;
};

struct XiReport {
    int d = 0;                  ///< maximal pole order
    std::vector<cplx> pol_d;    ///< poles of order d
    bool xi_prime = false;
    bool xi_triple_prime = false;
    std::optional<bool> xi_double_prime;  ///< nullopt: not evaluated
    int n_bound = 0;
    std::vector<PoleCollision> collisions;  ///< integer-shift collisions
    std::string details;

    /// True when one of the sufficient conditions for stable Z-shifts holds.
    [[nodiscard]] bool implies_stable_z_shifts() const { return xi_prime || xi_triple_prime; }
};

namespace detail {
inline constexpr double xi_tol = 1e-8;

/// The real shift delta with w = w2 e^{alpha delta}, if the directions agree.
inline std::optional<double> modulus_shift(cplx w, cplx w2, double alpha) {
    const cplx ratio = w / w2;
    if (std::abs(std::arg(ratio)) > xi_tol) return std::nullopt;
    return std::log(std::abs(ratio)) / alpha;
}
}  // namespace detail

/// Pole-collision conditions. Logarithm differences are compared
/// multiplicatively (w = w' e^{alpha n}) so that no branch choice enters.
/// The Gamma condition is only computable for periodic patterns, whose weak
/// limits are translates of the pattern itself.
inline XiReport xi_check(const Generator& g, const std::optional<SeparatedSet>& gamma = std::nullopt) {
    XiReport rep;
    const auto& poles = g.rational().poles();
    const double alpha = g.alpha();
    rep.d = g.rational().max_pole_order();
    for (const auto& p : poles)
        if (p.order == rep.d) rep.pol_d.push_back(p.location);
    const auto& pd = rep.pol_d;
    rep.xi_prime = pd.size() == 1;

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (cplx w : pd) lo = std::min(lo, std::log(std::abs(w))), hi = std::max(hi, std::log(std::abs(w)));
    rep.n_bound = pd.empty() ? 0 : static_cast<int>(std::ceil((hi - lo) / alpha)) + 2;

    std::vector<bool> free_w(pd.size(), true);
    for (std::size_t i = 0; i < pd.size(); ++i)
        for (std::size_t j = 0; j < pd.size(); ++j) {
            if (i == j) continue;
            for (int n = -rep.n_bound; n <= rep.n_bound; ++n) {
                const cplx target = pd[j] * std::exp(alpha * n);
                if (std::abs(pd[i] - target) <= detail::xi_tol * std::max(1.0, std::abs(pd[i]))) {
                    rep.collisions.push_back({pd[i], pd[j], static_cast<double>(n)});
                    free_w[i] = false;
                }
            }
        }
    rep.xi_triple_prime = pd.size() <= 1 || std::find(free_w.begin(), free_w.end(), true) != free_w.end();

    if (gamma && gamma->is_periodic()) {
        const auto* pat = gamma->as_periodic();
        bool holds = pd.size() <= 1;
        for (std::size_t i = 0; i < pd.size() && !holds; ++i)
            for (double gi : pat->offsets) {
                bool clean = true;
                for (std::size_t j = 0; j < pd.size() && clean; ++j) {
                    if (i == j) continue;
                    const auto delta = detail::modulus_shift(pd[i], pd[j], alpha);
                    if (!delta) continue;
                    const double x = gi + *delta;
                    const double r = x - pat->period * std::floor(x / pat->period);
                    double dist = pat->period;
                    for (double o : pat->offsets)
                        dist = std::min({dist, std::abs(r - o), std::abs(r - o - pat->period),
                                         std::abs(r - o + pat->period)});
                    if (dist <= detail::xi_tol * std::max(1.0, std::abs(*delta))) clean = false;
                }
                if (clean) {
                    holds = true;
                    break;
                }
            }
        rep.xi_double_prime = holds;
    }

    std::string d = "d=" + std::to_string(rep.d) + ", |pol_d|=" + std::to_string(pd.size()) + "; ";
    if (rep.implies_stable_z_shifts())
        d += "single maximal pole or collision-free maximal pole: Z-shifts stable";
    else
        d += "every maximal pole collides with another under e^{alpha n}: no conclusion for Z-shifts";
    if (!gamma)
        d += "; Gamma condition not requested";
    else if (!rep.xi_double_prime)
        d += "; Gamma condition not-evaluated (explicit set, weak limits not computable from a window)";
    else
        d += *rep.xi_double_prime ? "; Gamma condition holds" : "; Gamma condition fails";
    rep.details = d;
    return rep;
}

/// sum_k sup_{[k, k+1]} |G|. Each interval is sampled at 65 points and the
/// best sample is refined by golden-section search; the sum stops once the
/// envelope tail drops below 1e-14.
inline double wiener_norm(const Generator& g) {
    const DecayEnvelope& env = g.decay();
    const int K = static_cast<int>(std::ceil(env.radius(1e-16))) + 1;
    auto f = [&](double x) { return std::abs(g(x)); };
    double total = 0.0;
    for (int k = -K; k < K; ++k) {
        const double a = k;
        constexpr int n = 64;
        int best = 0;
        double bv = -1.0;
        for (int i = 0; i <= n; ++i) {
            const double v = f(a + static_cast<double>(i) / n);
            if (v > bv) bv = v, best = i;
        }
        double lo = a + std::max(0, best - 1) / static_cast<double>(n);
        double hi = a + std::min(n, best + 1) / static_cast<double>(n);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
            if (f1 < f2) {
                lo = x1, x1 = x2, f1 = f2;
                x2 = lo + gr * (hi - lo), f2 = f(x2);
            } else {
                hi = x2, x2 = x1, f2 = f1;
                x1 = hi - gr * (hi - lo), f1 = f(x1);
            }
        }
        total += std::max({bv, f1, f2});
    }
    return total;
}

}  // namespace sisamp
