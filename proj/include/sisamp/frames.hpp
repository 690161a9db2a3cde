#pragma once

// Finite-section sampling analysis: pre-Gramians, frame-bound estimates over
// window sweeps, sampling verdicts, interpolation and semi-regular Gabor sweeps.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sisamp/common.hpp"
#include "sisamp/generator.hpp"
#include "sisamp/sets.hpp"
#include "sisamp/spectral.hpp"

namespace sisamp {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// A[lambda, gamma] = G(lambda - gamma).
struct PreGramian {
    std::vector<double> lambda_pts;
    std::vector<double> gamma_pts;
    CMatrix entries;
    double W = 0.0;
    double L_ext = 0.0;
};

/// Column extension: envelope below 1e-13 beyond it.
inline double column_extension(const Generator& g) { return std::ceil(g.decay().radius(1e-13)); }

/// Default interior margin: the distance at which the envelope has dropped to
/// a tenth of its peak, capped at W/4. Larger margins cost columns, and the
/// finite-section bound approaches its limit like 1/(#columns)^2.
inline double default_interior_margin(const Generator& g, double W) {
    return std::min(g.decay().radius(0.1 * g.decay().amp), 0.25 * W);
}

inline PreGramian pre_gramian(const Generator& g, const SeparatedSet& lambda, const SeparatedSet& gamma, double W,
                              std::optional<double> L_ext = std::nullopt) {
    if (!(W > 0.0)) throw DomainError("window radius must be positive");
    PreGramian pg;
    pg.W = W;
    pg.L_ext = L_ext ? *L_ext : column_extension(g);
    pg.lambda_pts = lambda.points_in({-W, W});
    pg.gamma_pts = gamma.points_in({-W - pg.L_ext, W + pg.L_ext});
    if (pg.lambda_pts.empty()) throw DomainError("Lambda has no points in [-W, W]");
    if (pg.gamma_pts.empty()) throw DomainError("Gamma has no points in the extended window");
    const auto r = static_cast<Eigen::Index>(pg.lambda_pts.size());
    const auto c = static_cast<Eigen::Index>(pg.gamma_pts.size());
    pg.entries.resize(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            pg.entries(i, j) = g(pg.lambda_pts[static_cast<std::size_t>(i)] - pg.gamma_pts[static_cast<std::size_t>(j)]);
    return pg;
}

struct FrameBounds {
    double A_est = 0.0;
    double B_est = 0.0;
    int rows = 0;
    int cols = 0;
    double margin = 0.0;
    double residual = 0.0;  ///< worst eigen-residual of the reported pair
};

inline constexpr double eigen_residual_tol = 1e-8;

namespace detail {
/// Extreme eigenvalues of A*A with a residual certificate.
inline void extreme_eigen(const CMatrix& A, FrameBounds& fb) {
    const CMatrix M = A.adjoint() * A;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(M);
    if (es.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed on the Gram matrix");
    const auto& ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    const double mu_max = std::max(ev(n - 1), 0.0);
    fb.residual = 0.0;
    for (Eigen::Index idx : {Eigen::Index{0}, n - 1}) {
        const CVector v = es.eigenvectors().col(idx);
        fb.residual = std::max(fb.residual, (M * v - ev(idx) * v).norm() / v.norm());
    }
    if (fb.residual > eigen_residual_tol * std::max(1.0, mu_max))
        throw ConvergenceError("eigen-residual " + std::to_string(fb.residual) + " exceeds tolerance");
    double mu_min = std::max(ev(0), 0.0);
    if (fb.cols > fb.rows || mu_min < 1e-13 * mu_max) mu_min = 0.0;  // rank deficient
    fb.A_est = mu_min;
    fb.B_est = mu_max;
}
}  // namespace detail

/// Extreme eigenvalues of A*A for the columns inside [-W + margin, W - margin].
inline FrameBounds lower_frame_bound(const PreGramian& pg, double interior_margin) {
    if (!(interior_margin < pg.W)) throw DomainError("interior margin must be smaller than the window radius");
    FrameBounds fb;
    fb.margin = interior_margin;
    const double lo = -pg.W + interior_margin, hi = pg.W - interior_margin;
    const double tol = detail::inclusion_tol(lo, hi);
    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < pg.gamma_pts.size(); ++j)
        if (pg.gamma_pts[j] >= lo - tol && pg.gamma_pts[j] <= hi + tol) keep.push_back(static_cast<Eigen::Index>(j));
    fb.rows = static_cast<int>(pg.entries.rows());
    fb.cols = static_cast<int>(keep.size());
    if (keep.empty()) throw DomainError("no Gamma columns inside the interior window");
    CMatrix A(pg.entries.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) A.col(static_cast<Eigen::Index>(j)) = pg.entries.col(keep[j]);
    detail::extreme_eigen(A, fb);
    return fb;
}

/// Smallest common period p*T_a = q*T_b with p, q <= 64, if any.
inline std::optional<double> common_period(const SeparatedSet& a, const SeparatedSet& b) {
    const auto* pa = a.as_periodic();
    const auto* pb = b.as_periodic();
    if (!pa || !pb) return std::nullopt;
    for (int p = 1; p <= 64; ++p) {
        const double L = p * pa->period;
        const double q = std::round(L / pb->period);
        if (q >= 1.0 && q <= 64.0 && std::abs(L - q * pb->period) <= 1e-12 * L) return L;
    }
    return std::nullopt;
}

/// Finite section with periodic boundary: both sets are restricted to one
/// torus [0, L), L = 2^j times the common period with L >= 2W, and A[lambda, gamma] = sum_m G(lambda - gamma - m L). The
/// eigenvalues of A*A are the squared singular values of the block symbol at
/// the frequencies k 2^-j. The frequency grids nest as W doubles and always
/// contain 0 and 1/2; no truncation edge enters.
inline FrameBounds periodic_frame_bound(const Generator& g, const SeparatedSet& lambda, const SeparatedSet& gamma,
                                        double W) {
    const auto P = common_period(lambda, gamma);
    if (!P) throw DomainError("periodic section needs commensurate periodic sets");
    double periods = 1.0;
    while (periods * *P < 2.0 * W * (1.0 - 1e-12)) periods *= 2.0;
    const double L = *P * periods;
    const double reach = g.decay().radius(1e-17 * g.decay().amp) + 1.0;
    auto one_period = [&](const SeparatedSet& s) {
        std::vector<double> v;
        for (double x : s.points_in({0.0, L}))
            if (x < L * (1.0 - 1e-14)) v.push_back(x);
        return v;
    };
    const auto lp = one_period(lambda);
    const auto gp = one_period(gamma);
    FrameBounds fb;
    fb.rows = static_cast<int>(lp.size());
    fb.cols = static_cast<int>(gp.size());
    CMatrix A(static_cast<Eigen::Index>(lp.size()), static_cast<Eigen::Index>(gp.size()));
    for (std::size_t i = 0; i < lp.size(); ++i)
        for (std::size_t j = 0; j < gp.size(); ++j) {
            const double d = lp[i] - gp[j];
            const auto m0 = static_cast<long>(std::floor((d - reach) / L));
            const auto m1 = static_cast<long>(std::ceil((d + reach) / L));
            cplx s{};
            for (long m = m0; m <= m1; ++m) s += g(d - static_cast<double>(m) * L);
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
        }
    detail::extreme_eigen(A, fb);
    return fb;
}

/// Schur-test bound (max row sum)(max column sum) of the envelope majorant.
inline double schur_bound(const PreGramian& pg, const Generator& g) {
    const auto& env = g.decay();
    double rmax = 0.0, cmax = 0.0;
    for (double l : pg.lambda_pts) {
        double s = 0.0;
        for (double c : pg.gamma_pts) s += env(l - c);
        rmax = std::max(rmax, s);
    }
    for (double c : pg.gamma_pts) {
        double s = 0.0;
        for (double l : pg.lambda_pts) s += env(l - c);
        cmax = std::max(cmax, s);
    }
    return rmax * cmax;
}

enum class SamplingVerdict { sampling, not_sampling, inconclusive };

inline std::string to_string(SamplingVerdict v) {
    switch (v) {
        case SamplingVerdict::sampling: return "sampling";
        case SamplingVerdict::not_sampling: return "not-sampling";
        default: return "inconclusive";
    }
}

struct ThresholdContext {
    std::string rule;  ///< human-readable comparison
    double d_minus_lambda = 0.0;
    double d_plus_gamma = 0.0;
    double threshold = 0.0;
    bool hypothesis_holds = false;
    bool exact = true;
};

struct FrameReport {
    std::vector<double> windows;
    std::vector<double> lower_bounds;
    std::vector<double> upper_bounds;
    std::vector<double> margins;
    std::vector<int> rows;
    std::vector<int> cols;
    SamplingVerdict verdict = SamplingVerdict::inconclusive;
    ThresholdContext threshold_context;
    std::string stability = "unverified";
    std::string estimator = "open-section";
    double eps_frame = 1e-6;
    double rel_tol = 0.05;
};

enum class FrameEstimator { automatic, open_section, periodic_section };

struct FrameOptions {
    std::vector<double> windows;          ///< empty: class default
    std::optional<double> margin;         ///< empty: default_interior_margin
    double eps_frame = 1e-6;
    double rel_tol = 0.05;
    bool check_stability = true;
    unsigned threads = 1;
    /// automatic: periodic sections for commensurate periodic sets, open otherwise.
    FrameEstimator estimator = FrameEstimator::automatic;
};

inline std::vector<double> default_windows(const Generator& g) {
    if (g.cls() == GeneratorClass::K) return {10.0, 20.0, 40.0, 80.0};
    return {8.0, 16.0, 32.0};
}

namespace detail {
inline double density_radius(const SeparatedSet& s) {
    const auto* e = s.as_explicit();
    return e ? 0.25 * e->window.length() : 0.0;
}

inline DensityReport densities(const SeparatedSet& s) {
    if (s.is_periodic()) return beurling_densities(s);
    return beurling_densities(s, density_radius(s));
}
}  // namespace detail

inline ThresholdContext threshold_context(const Generator& g, const SeparatedSet& lambda, const SeparatedSet& gamma) {
    ThresholdContext tc;
    const auto dl = detail::densities(lambda);
    const auto dg = detail::densities(gamma);
    tc.d_minus_lambda = dl.d_minus;
    tc.d_plus_gamma = dg.d_plus;
    tc.exact = dl.exact && dg.exact;
    if (g.cls() == GeneratorClass::K) {
        const double qk = g.k() ? static_cast<double>(g.q()) / *g.k() : 0.0;
        tc.threshold = qk * dg.d_plus;
        tc.rule = "D-(Lambda) > (q/k) D+(Gamma)";
    } else {
        tc.threshold = static_cast<double>(g.q()) + 1.0;
        tc.rule = "D-(Lambda) > q + 1";
    }
    tc.hypothesis_holds = tc.d_minus_lambda > tc.threshold * (1.0 + 1e-12);
    return tc;
}

/// Stability label used by the verdicts: grid screen for Gamma = Z, pole
/// conditions otherwise.
inline std::string stability_label(const Generator& g, const SeparatedSet& gamma, unsigned threads = 1) {
    if (gamma.is_integer_lattice()) {
        const auto v = stability_check(g, 256, threads);
        return v.stable ? "stable (numerical grid)" : "unstable (numerical grid)";
    }
    const auto xi = xi_check(g, gamma);
    if (xi.xi_prime || xi.xi_double_prime.value_or(false)) return "stable (pole condition)";
    return "unverified";
}

/// Verdict from a sequence of lower bounds (see FrameReport).
inline SamplingVerdict classify(const std::vector<double>& lower, double eps_frame, double rel_tol) {
    const std::size_t n = lower.size();
    if (n >= 3) {
        bool ok = true;
        for (std::size_t i = n - 3; i < n; ++i) ok = ok && lower[i] > eps_frame;
        const double ref = lower[n - 1];
        for (std::size_t i = n - 3; i + 1 < n && ok; ++i)
            ok = std::abs(lower[i] - ref) <= rel_tol * ref;
        if (ok) return SamplingVerdict::sampling;
    }
    if (n >= 2) {
        bool halving = true;
        for (std::size_t i = 1; i < n; ++i) halving = halving && lower[i] <= 0.5 * lower[i - 1];
        if (halving) return SamplingVerdict::not_sampling;
    }
    return SamplingVerdict::inconclusive;
}

inline FrameReport sampling_verdict(const Generator& g, const SeparatedSet& lambda, const SeparatedSet& gamma,
                                    const FrameOptions& opt = {}) {
    FrameReport rep;
    rep.windows = opt.windows.empty() ? default_windows(g) : opt.windows;
    if (!std::is_sorted(rep.windows.begin(), rep.windows.end()))
        throw DomainError("window schedule must be increasing");
    rep.eps_frame = opt.eps_frame;
    rep.rel_tol = opt.rel_tol;
    rep.threshold_context = threshold_context(g, lambda, gamma);
    if (opt.check_stability) rep.stability = stability_label(g, gamma, opt.threads);
    const std::size_t n = rep.windows.size();
    rep.lower_bounds.resize(n);
    rep.upper_bounds.resize(n);
    rep.margins.resize(n);
    rep.rows.resize(n);
    rep.cols.resize(n);
    bool periodic = opt.estimator == FrameEstimator::periodic_section;
    if (opt.estimator == FrameEstimator::automatic) periodic = common_period(lambda, gamma).has_value();
    rep.estimator = periodic ? "periodic-section" : "open-section";
    parallel_for(n, opt.threads, [&](std::size_t i) {
        const double W = rep.windows[i];
        const double m = periodic ? 0.0 : (opt.margin ? *opt.margin : default_interior_margin(g, W));
        const auto fb = periodic ? periodic_frame_bound(g, lambda, gamma, W)
                                 : lower_frame_bound(pre_gramian(g, lambda, gamma, W), m);
        rep.lower_bounds[i] = fb.A_est;
        rep.upper_bounds[i] = fb.B_est;
        rep.margins[i] = m;
        rep.rows[i] = fb.rows;
        rep.cols[i] = fb.cols;
    });
    rep.verdict = classify(rep.lower_bounds, rep.eps_frame, rep.rel_tol);
    return rep;
}

struct InterpolationReport {
    double max_residual = 0.0;  ///< over interior Gamma nodes
    double coeff_norm = 0.0;    ///< ||d||_2 of the minimum-norm solution
    double condition = 0.0;     ///< singular-value ratio of the section
    int rows = 0;
    int cols = 0;
    double window = 0.0;
    double margin = 0.0;
};

/// Finds f = sum_lambda d_lambda G(. - lambda) with f(gamma) = target(gamma)
/// on Gamma cap [-W, W] by a minimum-norm solve over Lambda cap
/// [-W - m, W + m]; the residual is measured on the interior nodes
/// Gamma cap [-W + m, W - m]. `target` is indexed like gamma.points_in([-W, W]).
inline InterpolationReport interpolate(const Generator& g, const SeparatedSet& lambda, const SeparatedSet& gamma,
                                       const std::vector<cplx>& target, double W, std::optional<double> margin = {}) {
    const double m = margin ? *margin : default_interior_margin(g, W);
    const auto gp = gamma.points_in({-W, W});
    const auto lp = lambda.points_in({-W - m, W + m});
    if (gp.size() != target.size())
        throw DomainError("target has " + std::to_string(target.size()) + " entries, Gamma window has " +
                          std::to_string(gp.size()));
    if (lp.empty()) throw DomainError("Lambda has no points in the interpolation window");
    const auto r = static_cast<Eigen::Index>(gp.size());
    const auto c = static_cast<Eigen::Index>(lp.size());
    CMatrix B(r, c);
    CVector y(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        y(i) = target[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < c; ++j)
            B(i, j) = g(gp[static_cast<std::size_t>(i)] - lp[static_cast<std::size_t>(j)]);
    }
    Eigen::JacobiSVD<CMatrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    InterpolationReport rep;
    rep.rows = static_cast<int>(r);
    rep.cols = static_cast<int>(c);
    rep.window = W;
    rep.margin = m;
    rep.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (r > c || !(smin > 1e-12 * smax))
        throw DomainError("interpolation section is rank deficient (condition estimate " +
                          std::to_string(rep.condition) + ")");
    const CVector d = svd.solve(y);
    rep.coeff_norm = d.norm();
    const CVector res = B * d - y;
    const double lo = -W + m, hi = W - m;
    for (Eigen::Index i = 0; i < r; ++i) {
        const double x = gp[static_cast<std::size_t>(i)];
        if (x >= lo && x <= hi) rep.max_residual = std::max(rep.max_residual, std::abs(res(i)));
    }
    return rep;
}

/// Interpolation demo with its precondition: the sampling verdict for
/// (Lambda, Gamma) must be "sampling".
inline InterpolationReport interpolate_demo(const Generator& g, const SeparatedSet& lambda, const SeparatedSet& gamma,
                                            const std::vector<cplx>& target, double W, const FrameReport& frames) {
    if (frames.verdict != SamplingVerdict::sampling)
        throw DomainError("interpolation demo needs a sampling configuration (verdict was " +
                          to_string(frames.verdict) + ")");
    return interpolate(g, lambda, gamma, target, W);
}

enum class GaborVerdict { frame, no_frame, inconclusive };

inline std::string to_string(GaborVerdict v) {
    switch (v) {
        case GaborVerdict::frame: return "frame";
        case GaborVerdict::no_frame: return "no-frame";
        default: return "inconclusive";
    }
}

struct GaborReport {
    std::vector<double> xs;
    std::vector<double> last_lower;  ///< last-window lower bound per x
    std::vector<SamplingVerdict> verdicts;
    double inf_lower = 0.0;
    double witness_x = 0.0;
    GaborVerdict verdict = GaborVerdict::inconclusive;
    std::string system = "G(g, -Lambda x Z)";
    std::string caveat = "grid-screened: x restricted to a uniform grid of [0,1)";
    std::string stability = "unverified";
};

/// The Gabor system with time nodes -Lambda and integer modulations is a
/// frame iff Lambda + x is a sampling set for the Z-shifts of g for every x.
inline GaborReport gabor_frame_sweep(const Generator& g, const SeparatedSet& lambda, int x_grid_size = 64,
                                     const FrameOptions& opt = {}) {
    if (x_grid_size < 1) throw DomainError("x grid needs at least one point");
    GaborReport rep;
    const auto Z = SeparatedSet::integers();
    if (opt.check_stability) rep.stability = stability_label(g, Z, opt.threads);
    FrameOptions inner = opt;
    inner.check_stability = false;
    inner.threads = 1;
    const auto n = static_cast<std::size_t>(x_grid_size);
    rep.xs.resize(n);
    rep.last_lower.resize(n);
    rep.verdicts.resize(n);
    parallel_for(n, opt.threads, [&](std::size_t j) {
        const double x = static_cast<double>(j) / x_grid_size;
        const auto fr = sampling_verdict(g, translate(lambda, x), Z, inner);
        rep.xs[j] = x;
        rep.last_lower[j] = fr.lower_bounds.back();
        rep.verdicts[j] = fr.verdict;
    });
    rep.inf_lower = rep.last_lower[0];
    for (std::size_t j = 0; j < n; ++j)
        if (rep.last_lower[j] < rep.inf_lower) rep.inf_lower = rep.last_lower[j], rep.witness_x = rep.xs[j];
    const bool all_sampling = std::all_of(rep.verdicts.begin(), rep.verdicts.end(),
                                          [](SamplingVerdict v) { return v == SamplingVerdict::sampling; });
    const bool any_not = std::any_of(rep.verdicts.begin(), rep.verdicts.end(),
                                     [](SamplingVerdict v) { return v == SamplingVerdict::not_sampling; });
    rep.verdict = all_sampling ? GaborVerdict::frame : (any_not ? GaborVerdict::no_frame : GaborVerdict::inconclusive);
    return rep;
}

}  // namespace sisamp
