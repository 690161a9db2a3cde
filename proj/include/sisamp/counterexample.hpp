#pragma once

// Critical-density vanishing functions and the two instability examples.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sisamp/common.hpp"
#include "sisamp/frames.hpp"
#include "sisamp/generator.hpp"
#include "sisamp/sets.hpp"
#include "sisamp/spectral.hpp"
#include "sisamp/synthesis.hpp"

namespace sisamp {

enum class VanisherCase { case1_even, case2_odd, gaussian };

inline std::string to_string(VanisherCase c) {
    switch (c) {
        case VanisherCase::case1_even: return "case1_even";
        case VanisherCase::case2_odd: return "case2_odd";
        default: return "gaussian";
    }
}

struct VanisherSolution {
    Generator g;
    VanisherCase case_tag = VanisherCase::case1_even;
    int N = 0;
    double alpha = 1.0;
    std::vector<double> b;
    std::vector<double> nodes;
    std::vector<double> coeffs;  ///< a_1..a_N, or a_0..a_N for the gaussian case
    bool signed_periodization = false;  ///< (-1)^n weights, f(x+1) = -f(x)
    SeparatedSet zero_set;
    std::vector<double> zeros_found;  ///< every certified zero on [0, 1)
    int extra_zeros = 0;              ///< zeros found beyond the required count
    double max_residual = 0.0;
    double condition = 0.0;  ///< 1/rcond of the alternation system
    int node_perturbations = 0;
    bool extrapolated = false;  ///< gaussian case with odd N
};

namespace detail {

/// sum_n s^n term(x - n) for s = +-1, summed until terms are negligible.
template <class Term>
double periodize(Term&& term, double x, bool sign, double reach) {
    const auto n0 = static_cast<long>(std::floor(x - reach));
    const auto n1 = static_cast<long>(std::ceil(x + reach));
    double s = 0.0;
    for (long n = n0; n <= n1; ++n) {
        const double v = term(x - static_cast<double>(n));
        s += (sign && (n & 1)) ? -v : v;
    }
    return s;
}

/// 1/(2 cosh(alpha y)), written without overflow.
inline double hsec(double alpha, double y) {
    const double e = std::exp(-alpha * std::abs(y));
    return e / (1.0 + e * e);
}

struct VanisherBasis {
    VanisherCase c;
    double alpha;
    std::vector<double> b;
    bool sign;

    [[nodiscard]] std::size_t size() const { return c == VanisherCase::gaussian ? b.size() + 1 : b.size(); }

    [[nodiscard]] double reach() const {
        return c == VanisherCase::gaussian ? std::sqrt(2.0 * 45.0 / alpha) + 2.0 : 45.0 / alpha + 2.0;
    }

    /// phi_j(x) (hsec cases) or psi_j(x) (gaussian, j = 0 is the pure Gaussian).
    [[nodiscard]] double operator()(std::size_t j, double x) const {
        const double r = reach();
        if (c != VanisherCase::gaussian) {
            const double bj = b[j];
            return periodize([&](double y) { return hsec(alpha, y - bj); }, x, sign, r);
        }
        if (j == 0) return periodize([&](double y) { return std::exp(-0.5 * alpha * y * y); }, x, sign, r);
        const double eb = std::exp(alpha * b[j - 1]);
        return periodize(
            [&](double y) { return std::exp(-0.5 * alpha * y * y) / (std::exp(alpha * y) + eb); }, x, sign, r);
    }

    [[nodiscard]] double eval(const std::vector<double>& a, double x) const {
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * (*this)(j, x);
        return s;
    }
};

/// Sign-change zeros of f on [lo, hi) on a uniform grid, refined by bisection
/// to width below 1e-12.
template <class F>
std::vector<double> bracket_zeros(F&& f, double lo, double hi, std::size_t grid) {
    std::vector<double> zs;
    const double h = (hi - lo) / static_cast<double>(grid);
    double xa = lo, fa = f(lo);
    for (std::size_t k = 1; k <= grid; ++k) {
        const double xb = lo + static_cast<double>(k) * h;
        const double fb = f(xb);
        if (fa == 0.0) {
            zs.push_back(xa);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            double a = xa, b = xb, va = fa;
            while (b - a >= 1e-12) {
                const double m = 0.5 * (a + b);
                const double vm = f(m);
                if (vm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((vm < 0.0) == (va < 0.0))
                    a = m, va = vm;
                else
                    b = m;
            }
            zs.push_back(0.5 * (a + b));
        }
        xa = xb;
        fa = fb;
    }
    return zs;
}

}  // namespace detail

inline constexpr double vanisher_cond_limit = 1e12;

/// Builds f = sum_j a_j phi_j with f(x_l) = (-1)^l and certifies its zeros.
/// Periodization: plain (1-periodic) for an even system size, signed
/// ((-1)^n, f(x+1) = -f(x)) for an odd one.
inline VanisherSolution build_vanisher(VanisherCase c, int N, std::vector<double> b, double alpha = 1.0,
                                       std::uint64_t seed = 7) {
    if (N < 1) throw DomainError("N must be positive");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (static_cast<int>(b.size()) != N) throw DomainError("need exactly N shifts b_j");
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (!(b[j] > 0.0)) throw DomainError("shifts b_j must be positive");
        if (j > 0 && !(b[j] > b[j - 1])) throw DomainError("shifts b_j must be strictly increasing");
        for (std::size_t k = 0; k < j; ++k) {
            const double d = b[j] - b[k];
            if (std::abs(d - std::round(d)) < 1e-9) throw DomainError("b_j - b_k must not be an integer");
        }
    }
    if (c == VanisherCase::case1_even && N % 2 != 0) throw DomainError("case1 needs an even N");
    if (c == VanisherCase::case2_odd && N % 2 == 0) throw DomainError("case2 needs an odd N");

    detail::VanisherBasis basis{c, alpha, b, false};
    const std::size_t n = basis.size();
    basis.sign = n % 2 == 1;

    VanisherSolution sol{c == VanisherCase::gaussian ? gaussian() : hyperbolic_secant(alpha), c, N, alpha, b,
                         {}, {}, basis.sign, SeparatedSet::integers(), {}, 0, 0.0, 0.0, 0, false};
    sol.extrapolated = c == VanisherCase::gaussian && N % 2 == 1;

    std::vector<double> x(n);
    for (std::size_t l = 0; l < n; ++l) x[l] = static_cast<double>(l + 1) / static_cast<double>(n + 1);
    std::mt19937_64 rng(seed);
    const double jitter = 1.0 / (4.0 * static_cast<double>(n + 1));
    std::uniform_real_distribution<double> U(-jitter, jitter);
    Eigen::VectorXd a;
    for (int attempt = 0;; ++attempt) {
        Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t l = 0; l < n; ++l) {
            rhs(static_cast<Eigen::Index>(l)) = (l % 2 == 0) ? -1.0 : 1.0;  // (-1)^l with l = 1..n
            for (std::size_t j = 0; j < n; ++j)
                M(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = basis(j, x[l]);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        const double rc = lu.rcond();
        sol.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
        if (sol.condition <= vanisher_cond_limit) {
            a = lu.solve(rhs);
            break;
        }
        if (attempt >= 8) {
            std::ostringstream os;
            os << "alternation system singular after 8 node perturbations; matrix:\n" << M;
            throw ConvergenceError(os.str());
        }
        ++sol.node_perturbations;
        for (std::size_t l = 0; l < n; ++l)
            x[l] = std::clamp(static_cast<double>(l + 1) / static_cast<double>(n + 1) + U(rng), 1e-3, 1.0 - 1e-3);
        std::sort(x.begin(), x.end());
    }
    sol.nodes = x;
    sol.coeffs.assign(a.data(), a.data() + a.size());

    // Generator G with f = sum_n s^n G(x - n).
    if (c == VanisherCase::gaussian) {
        std::vector<cplx> aj(sol.coeffs.begin() + 1, sol.coeffs.end());
        sol.g = gaussian_combination(alpha, sol.coeffs[0], aj, b);
    } else {
        std::vector<cplx> aj(sol.coeffs.begin(), sol.coeffs.end());
        std::vector<cplx> bj(b.begin(), b.end());
        sol.g = hsec_combination(alpha, aj, bj);
    }

    auto f = [&](double t) { return basis.eval(sol.coeffs, t); };
    sol.zeros_found = detail::bracket_zeros(f, 0.0, 1.0, std::size_t{1} << 14);
    // Zeros required on [0, 1): N for the hsec cases (2N on [0, 2) by
    // antiperiodicity in case 2), N + 1 for the gaussian case.
    const std::size_t need = c == VanisherCase::gaussian ? static_cast<std::size_t>(N) + 1 : static_cast<std::size_t>(N);
    if (sol.zeros_found.size() < need)
        throw ConvergenceError("found " + std::to_string(sol.zeros_found.size()) + " sign changes on [0,1), need " +
                               std::to_string(need) + " (grid 2^14)");
    sol.extra_zeros = static_cast<int>(sol.zeros_found.size() - need);
    std::vector<double> keep(sol.zeros_found.begin(), sol.zeros_found.begin() + static_cast<long>(need));
    for (double z : keep) sol.max_residual = std::max(sol.max_residual, std::abs(f(z)));
    if (c == VanisherCase::case1_even) {
        sol.zero_set = SeparatedSet::periodic(keep, 1.0);
    } else {
        // Period 2: the kept zeros and their unit translates.
        std::vector<double> two = keep;
        for (double z : keep) two.push_back(z + 1.0);
        for (double z : keep) sol.max_residual = std::max(sol.max_residual, std::abs(f(z + 1.0)));
        sol.zero_set = SeparatedSet::periodic(two, 2.0);
    }
    return sol;
}

/// f = sum_n s^n G(x - n) evaluated through the shift-invariant space, as an
/// independent route to the basis evaluation inside build_vanisher.
inline SISFunction vanisher_function(const VanisherSolution& v) {
    const bool sign = v.signed_periodization;
    auto rule = [sign](double gpt) -> cplx {
        const auto k = static_cast<long>(std::llround(gpt));
        return (sign && (k & 1)) ? -1.0 : 1.0;
    };
    return SISFunction(v.g, SeparatedSet::integers(), rule, 1.0);
}

/// Direct basis evaluation of the vanisher.
inline double vanisher_value(const VanisherSolution& v, double x) {
    detail::VanisherBasis basis{v.case_tag, v.alpha, v.b, v.signed_periodization};
    return basis.eval(v.coeffs, x);
}

/// `s` described with period repeat * T plus `extra` points placed one by one
/// at the midpoint of the currently largest gap.
inline SeparatedSet augment(const SeparatedSet& s, int repeat, int extra) {
    const auto big = repeat_period(s, repeat);
    const auto* p = big.as_periodic();
    std::vector<double> o = p->offsets;
    for (int e = 0; e < extra; ++e) {
        double best = o.front() + p->period - o.back();
        double at = o.back() + 0.5 * best;
        for (std::size_t i = 1; i < o.size(); ++i)
            if (o[i] - o[i - 1] > best) best = o[i] - o[i - 1], at = 0.5 * (o[i] + o[i - 1]);
        o.push_back(at - p->period * std::floor(at / p->period));
        std::sort(o.begin(), o.end());
    }
    return SeparatedSet::periodic(o, p->period);
}

struct NonuniquenessReport {
    FrameReport frames;
    StabilityVerdict stability;
    bool not_sampling = false;
    bool stable = false;
};

/// Lambda = zero set, Gamma = Z: expects not-sampling together with stable Z-shifts.
inline NonuniquenessReport verify_nonuniqueness(const VanisherSolution& v, const FrameOptions& opt = {}) {
    NonuniquenessReport rep;
    FrameOptions o = opt;
    o.check_stability = false;
    rep.frames = sampling_verdict(v.g, v.zero_set, SeparatedSet::integers(), o);
    rep.stability = stability_check(v.g, 256, opt.threads);
    rep.frames.stability = rep.stability.stable ? "stable (numerical grid)" : "unstable (numerical grid)";
    rep.not_sampling = rep.frames.verdict == SamplingVerdict::not_sampling;
    rep.stable = rep.stability.stable;
    return rep;
}

struct ExgReport {
    Generator g;
    double grid_max = 0.0;  ///< max |sum_n H(x - n)| on the grid
    double tail_bound = 0.0;
    double hat_max_integers = 0.0;  ///< max |H^(n)|, |n| <= 3, closed form
    StabilityVerdict stability;
    XiReport xi;
    std::optional<PoleCollision> witness;
};

/// H = hsec - T_1 hsec, alpha = 1.
inline ExgReport verify_exg_example(int grid = 1000) {
    const std::vector<cplx> a{1.0, -1.0}, b{0.0, 1.0};
    ExgReport rep{hsec_combination(1.0, a, b), 0.0, 0.0, 0.0, {}, {}, std::nullopt};
    const SISFunction f(rep.g, SeparatedSet::integers(), [](double) { return cplx{1.0}; }, 1.0);
    rep.tail_bound = f.tail_bound();
    for (int k = 0; k < grid; ++k) rep.grid_max = std::max(rep.grid_max, std::abs(f(static_cast<double>(k) / grid)));
    // H^(t) = (1 - e^{-2 pi i t}) hsec^(t) with hsec^(t) = (pi/2) sech(pi^2 t).
    for (int n = -3; n <= 3; ++n) {
        const cplx factor = 1.0 - std::polar(1.0, -two_pi * n);
        rep.hat_max_integers = std::max(rep.hat_max_integers, std::abs(factor) * 0.5 * pi / std::cosh(pi * pi * n));
    }
    rep.stability = stability_check(rep.g);
    rep.xi = xi_check(rep.g);
    for (const auto& c : rep.xi.collisions)
        if (c.shift == 1.0) {
            rep.witness = c;
            break;
        }
    return rep;
}

struct HdefReport {
    Generator g;
    cplx A;
    std::vector<cplx> hat;  ///< H^(n), n = -3..3
    double hat_max = 0.0;
    StabilityVerdict stability;
    XiReport xi;
};

/// The two-pole part U_0(u) = e^{i-1/2}/(u - e^i) - e^{1+2i}/(u - e^{1+i})
/// as (numerator, denominator) in u = e^z.
inline std::pair<ComplexPoly, ComplexPoly> hdef_two_pole_part() {
    const cplx w1 = std::exp(cplx{0.0, 1.0}), w2 = std::exp(cplx{1.0, 1.0});
    const cplx c1 = std::exp(cplx{-0.5, 1.0}), c2 = std::exp(cplx{1.0, 2.0});
    const ComplexPoly Q = ComplexPoly{-w1, 1.0} * ComplexPoly{-w2, 1.0};
    const ComplexPoly P = c1 * ComplexPoly{-w2, 1.0} - c2 * ComplexPoly{-w1, 1.0};
    return {P, Q};
}

/// The Gaussian-class example: H = (A + U_0(e^z)) e^{-z^2/2} with A fixed by
/// int H = 0, computed by quadrature.
inline HdefReport verify_hdef_example() {
    const auto [P0, Q] = hdef_two_pole_part();
    const Generator u0 = make_generator(GeneratorClass::C, 1.0, P0, Q);
    const cplx integral = Spectrum(u0).by_quadrature(0.0).value;
    const cplx A = -integral / std::sqrt(two_pi);
    HdefReport rep{make_generator(GeneratorClass::C, 1.0, A * Q + P0, Q), A, {}, 0.0, {}, {}};
    const Spectrum sp(rep.g);
    for (int n = -3; n <= 3; ++n) {
        rep.hat.push_back(sp.by_quadrature(n).value);
        rep.hat_max = std::max(rep.hat_max, std::abs(rep.hat.back()));
    }
    rep.stability = stability_check(sp);
    rep.xi = xi_check(rep.g);
    return rep;
}

}  // namespace sisamp
