#pragma once

// Generators of the exponential class K(alpha), G(z) = R(e^{alpha z}), and of
// the Gaussian class C(alpha), G(z) = e^{-alpha z^2/2} R(e^{alpha z}).

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sisamp/common.hpp"
#include "sisamp/polyrat.hpp"

namespace sisamp {

enum class GeneratorClass { K, C };

inline std::string to_string(GeneratorClass c) { return c == GeneratorClass::K ? "K" : "C"; }

enum class Rejection {
    InvalidAlpha,
    ZeroPolynomial,
    NotCoprime,
    MonomialPair,
    ConditionA,  ///< 1 <= deg P < deg Q
    ConditionB,  ///< P(0) = 0
    ConditionC,  ///< Q has no root on [0, inf)
    CoincidentShifts,
    BadArguments,
};

inline std::string to_string(Rejection r) {
    switch (r) {
        case Rejection::InvalidAlpha: return "invalid-alpha";
        case Rejection::ZeroPolynomial: return "zero-polynomial";
        case Rejection::NotCoprime: return "not-coprime";
        case Rejection::MonomialPair: return "monomial-pair";
        case Rejection::ConditionA: return "condition-A";
        case Rejection::ConditionB: return "condition-B";
        case Rejection::ConditionC: return "condition-C";
        case Rejection::CoincidentShifts: return "coincident-shifts";
        case Rejection::BadArguments: return "bad-arguments";
    }
    return "unknown";
}

class GeneratorError : public DomainError {
public:
    GeneratorError(Rejection reason, const std::string& what)
        : DomainError(to_string(reason) + ": " + what), reason_(reason) {}

    [[nodiscard]] Rejection reason() const { return reason_; }

private:
    Rejection reason_;
};

/// Pointwise majorant of |G| on the real line.
///   exponential: amp * exp(-rate |x|)
///   gaussian:    amp * exp(-rate x^2 / 2 + slope |x|)
struct DecayEnvelope {
    enum class Kind { exponential, gaussian };
    Kind kind = Kind::exponential;
    double rate = 1.0;
    double amp = 1.0;
    double slope = 0.0;
    int poly_growth = 0;

    [[nodiscard]] double operator()(double x) const {
        const double ax = std::abs(x);
        if (kind == Kind::exponential) return amp * std::exp(-rate * ax);
        return amp * std::exp(-0.5 * rate * ax * ax + slope * ax);
    }

    /// Smallest r >= 0 with envelope(x) <= eps for all |x| >= r.
    [[nodiscard]] double radius(double eps) const {
        if (amp <= eps && slope == 0.0) return 0.0;
        const double l = std::log(amp / eps);
        if (kind == Kind::exponential) return std::max(0.0, l / rate);
        const double disc = slope * slope + 2.0 * rate * std::max(l, 0.0);
        return std::max(0.0, (slope + std::sqrt(disc)) / rate);
    }

    /// sum_{j>=0} envelope(start + j*step), start >= 0, step > 0.
    [[nodiscard]] double tail_sum(double start, double step) const {
        if (kind == Kind::exponential) return (*this)(start) / (1.0 - std::exp(-rate * step));
        double sum = 0.0;
        const double peak = slope / rate;
        for (int j = 0; j < 1'000'000; ++j) {
            const double x = start + j * step;
            const double term = (*this)(x);
            sum += term;
            if (x > peak && term <= 1e-18 * sum) break;
            if (x > peak && sum == 0.0 && term == 0.0) break;
        }
        return sum;
    }
};

class Generator;
Generator make_generator(GeneratorClass cls, double alpha, ComplexPoly P, ComplexPoly Q);

/// A validated member of K(alpha) or C(alpha). Immutable.
class Generator {
public:
    [[nodiscard]] GeneratorClass cls() const { return cls_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] const RationalFn& rational() const { return r_; }
    /// Largest k with G(z + 2 pi i/(k alpha)) = c G(z); nullopt if unbounded.
    [[nodiscard]] std::optional<int> k() const { return k_; }
    /// Degree of the denominator Q.
    [[nodiscard]] int q() const { return r_.den().degree(); }
    /// The constant c of the symmetry relation (class K only).
    [[nodiscard]] std::optional<cplx> sym_const() const { return sym_const_; }
    /// Logarithms of the poles with 0 < Im < 2 pi, repeated by pole order.
    [[nodiscard]] const std::vector<cplx>& log_poles() const { return log_poles_; }
    [[nodiscard]] const DecayEnvelope& decay() const { return decay_; }

    /// G(z), or nullopt at a pole. Evaluated in the log domain: the power of
    /// e^{alpha z} that dominates on each side is pulled into the exponent
    /// together with the Gaussian factor, so no intermediate overflows.
    [[nodiscard]] std::optional<cplx> eval(cplx z) const { return eval_impl(z, true); }

    /// G(x) on the real axis, where condition (C) rules out poles.
    [[nodiscard]] cplx operator()(double x) const {
        auto v = eval_impl(cplx{x, 0.0}, true);
        if (!v) throw DomainError("generator has a pole on the real axis at x=" + std::to_string(x));
        return *v;
    }

    /// R(e^{alpha z}) without the Gaussian factor (identical to eval for class K).
    [[nodiscard]] std::optional<cplx> eval_rational_part(cplx z) const { return eval_impl(z, false); }

private:
    friend Generator make_generator(GeneratorClass, double, ComplexPoly, ComplexPoly);
    Generator() = default;

    [[nodiscard]] std::optional<cplx> eval_impl(cplx z, bool with_gaussian) const {
        const cplx w = alpha_ * z;
        cplx log_factor{};
        cplx ratio;
        if (w.real() <= 0.0) {
            const cplx u = std::exp(w);
            const double au = std::abs(u);
            const cplx den = r_.den()(u);
            if (std::abs(den) <= pole_threshold * r_.den().magnitude_sum(au)) return std::nullopt;
            ratio = p_low_(u) / den;
            log_factor = static_cast<double>(j0_) * w;
        } else {
            const cplx v = std::exp(-w);
            const double av = std::abs(v);
            const cplx den = q_rev_(v);
            if (std::abs(den) <= pole_threshold * q_rev_.magnitude_sum(av)) return std::nullopt;
            ratio = p_rev_(v) / den;
            log_factor = static_cast<double>(r_.num().degree() - r_.den().degree()) * w;
        }
        if (with_gaussian && cls_ == GeneratorClass::C) log_factor -= 0.5 * alpha_ * z * z;
        if (log_factor == cplx{}) return ratio;
        return std::exp(log_factor) * ratio;
    }

    GeneratorClass cls_ = GeneratorClass::K;
    double alpha_ = 1.0;
    RationalFn r_;
    std::optional<int> k_;
    std::optional<cplx> sym_const_;
    std::vector<cplx> log_poles_;
    DecayEnvelope decay_;
    int j0_ = 0;
    ComplexPoly p_low_;
    ComplexPoly p_rev_;
    ComplexPoly q_rev_;
};

namespace detail {

inline double arg_0_2pi(cplx w) {
    double a = std::arg(w);
    if (a < 0.0) a += two_pi;
    return a;
}

/// Scans the scaled magnitude that the envelope must dominate. `scaled(x)`
/// returns |G(x)| e^{rate|x|} (class K) or |R(e^{alpha x})| e^{-slope|x|}
/// (class C); `limits` are its values at +-infinity.
template <class F>
double envelope_amplitude(F&& scaled, double alpha, const std::vector<Pole>& poles, double limits) {
    double log_span = 0.0;
    double y_min = pi;
    for (const auto& p : poles) {
        log_span = std::max(log_span, std::abs(std::log(std::abs(p.location))));
        const double a = arg_0_2pi(p.location);
        y_min = std::min(y_min, std::min(a, two_pi - a));
    }
    const double X = (log_span + 20.0) / alpha;
    double h = std::min(0.01, y_min / alpha / 8.0);
    const double max_points = 4e6;
    if (2.0 * X / h > max_points) h = 2.0 * X / max_points;
    double m = limits;
    const auto n = static_cast<long>(std::ceil(2.0 * X / h));
    for (long i = 0; i <= n; ++i) m = std::max(m, scaled(-X + static_cast<double>(i) * h));
    return 1.1 * m;
}

}  // namespace detail

/// Validates and builds a generator. Class K enforces conditions (A)-(C),
/// class C only (C); both require P and Q coprime. Each violation raises a
/// GeneratorError with a distinct Rejection.
inline Generator make_generator(GeneratorClass cls, double alpha, ComplexPoly P, ComplexPoly Q) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw GeneratorError(Rejection::InvalidAlpha, "alpha must be a positive finite number");
    if (P.is_zero() || Q.is_zero())
        throw GeneratorError(Rejection::ZeroPolynomial, "P and Q must be non-trivial");

    if (cls == GeneratorClass::K) {
        if (P.support().size() == 1 && Q.support().size() == 1)
            throw GeneratorError(Rejection::MonomialPair,
                                 "P and Q are both monomials; k(G) is undefined");
        if (!(P.degree() >= 1 && P.degree() < Q.degree()))
            throw GeneratorError(Rejection::ConditionA,
                                 "need 1 <= deg P < deg Q, got deg P=" + std::to_string(P.degree()) +
                                     ", deg Q=" + std::to_string(Q.degree()));
        if (std::abs(P[0]) > 1e-14 * P.max_coeff())
            throw GeneratorError(Rejection::ConditionB, "P(0) must vanish");
        if (P[0] != cplx{}) {
            auto c = P.coeffs();
            c[0] = cplx{};
            P = ComplexPoly(std::move(c));
        }
    }

    if (!coprime_check(P, Q))
        throw GeneratorError(Rejection::NotCoprime,
                             "P=" + P.to_string() + " and Q=" + Q.to_string() + " share a root");

    Generator g;
    g.cls_ = cls;
    g.alpha_ = alpha;
    g.r_ = RationalFn(P, Q);

    for (const auto& pole : g.r_.poles()) {
        const cplx w = pole.location;
        if (std::abs(w.imag()) < 1e-9 * std::max(1.0, std::abs(w)) && w.real() >= -1e-9)
            throw GeneratorError(Rejection::ConditionC,
                                 "Q has a root on [0, inf) near " + std::to_string(w.real()));
    }

    g.k_ = support_gcd(P, Q);
    g.j0_ = P.lowest_power();
    g.p_low_ = P.shifted_down(g.j0_);
    g.p_rev_ = P.reversed();
    g.q_rev_ = Q.reversed();
    if (cls == GeneratorClass::K && g.k_) {
        const int shift = g.j0_ - Q.lowest_power();
        g.sym_const_ = std::polar(1.0, two_pi * static_cast<double>(shift) / *g.k_);
    }

    for (const auto& pole : g.r_.poles()) {
        const cplx lw{std::log(std::abs(pole.location)), detail::arg_0_2pi(pole.location)};
        for (int m = 0; m < pole.order; ++m) g.log_poles_.push_back(lw);
    }

    const int dP = P.degree();
    const int dQ = Q.degree();
    DecayEnvelope env;
    if (cls == GeneratorClass::K) {
        env.kind = DecayEnvelope::Kind::exponential;
        env.rate = alpha * std::min(g.j0_, dQ - dP);
        const double limits = std::max(std::abs(P[g.j0_] / Q[0]), std::abs(P.leading() / Q.leading()));
        env.amp = detail::envelope_amplitude(
            [&](double x) { return std::abs(g(x)) * std::exp(env.rate * std::abs(x)); }, alpha,
            g.r_.poles(), limits);
    } else {
        env.kind = DecayEnvelope::Kind::gaussian;
        env.rate = alpha;
        env.poly_growth = std::max(dP - dQ, 0);
        env.slope = alpha * env.poly_growth;
        double limits = std::abs(P[0] / Q[0]);
        if (dP >= dQ) limits = std::max(limits, std::abs(P.leading() / Q.leading()));
        env.amp = detail::envelope_amplitude(
            [&](double x) {
                auto v = g.eval_rational_part(cplx{x, 0.0});
                return std::abs(*v) * std::exp(-env.slope * std::abs(x));
            },
            alpha, g.r_.poles(), limits);
    }
    g.decay_ = env;
    return g;
}

/// sum_j a_j H_alpha(x - b_j) with H_alpha(y) = e^{alpha y}/(e^{2 alpha y} + 1),
/// assembled over the common denominator prod_j (u^2 + e^{2 alpha b_j}).
inline Generator hsec_combination(double alpha, std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size() || a.empty())
        throw GeneratorError(Rejection::BadArguments, "a and b must be non-empty and of equal length");
    const std::size_t n = a.size();
    std::vector<cplx> beta(n), beta2(n);
    for (std::size_t j = 0; j < n; ++j) {
        beta[j] = std::exp(alpha * b[j]);
        beta2[j] = std::exp(2.0 * alpha * b[j]);
        if (std::abs(beta2[j].imag()) <= 1e-12 * std::abs(beta2[j]) && beta2[j].real() <= 0.0)
            throw GeneratorError(Rejection::ConditionC,
                                 "e^{2 alpha b_j} lies on (-inf, 0] for j=" + std::to_string(j));
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            if (std::abs(beta2[j] - beta2[k]) <= 1e-9 * std::max(std::abs(beta2[j]), std::abs(beta2[k])))
                throw GeneratorError(Rejection::CoincidentShifts,
                                     "b_" + std::to_string(j) + " and b_" + std::to_string(k) +
                                         " coincide modulo the period");
    auto quad = [&](std::size_t j) { return ComplexPoly{beta2[j], 0.0, 1.0}; };
    ComplexPoly Q = ComplexPoly::constant(1.0);
    for (std::size_t j = 0; j < n; ++j) Q = Q * quad(j);
    ComplexPoly S;
    for (std::size_t j = 0; j < n; ++j) {
        ComplexPoly term = ComplexPoly::constant(a[j] * beta[j]);
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) term = term * quad(k);
        S = S + term;
    }
    return make_generator(GeneratorClass::K, alpha, ComplexPoly{0.0, 1.0} * S, Q);
}

/// e^{-alpha x^2/2} (a0 + sum_j a_j / (e^{alpha x} + e^{alpha b_j})), b_j real.
inline Generator gaussian_combination(double alpha, cplx a0, std::span<const cplx> a,
                                      std::span<const double> b) {
    if (a.size() != b.size())
        throw GeneratorError(Rejection::BadArguments, "a and b must have equal length");
    const std::size_t n = a.size();
    std::vector<double> beta(n);
    for (std::size_t j = 0; j < n; ++j) beta[j] = std::exp(alpha * b[j]);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            if (std::abs(beta[j] - beta[k]) <= 1e-9 * std::max(beta[j], beta[k]))
                throw GeneratorError(Rejection::CoincidentShifts,
                                     "b_" + std::to_string(j) + " and b_" + std::to_string(k) + " coincide");
    auto lin = [&](std::size_t j) { return ComplexPoly{beta[j], 1.0}; };
    ComplexPoly Q = ComplexPoly::constant(1.0);
    for (std::size_t j = 0; j < n; ++j) Q = Q * lin(j);
    ComplexPoly P = a0 * Q;
    for (std::size_t j = 0; j < n; ++j) {
        ComplexPoly term = ComplexPoly::constant(a[j]);
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) term = term * lin(k);
        P = P + term;
    }
    return make_generator(GeneratorClass::C, alpha, P, Q);
}

/// The hyperbolic secant generator e^{alpha x}/(e^{2 alpha x} + 1).
inline Generator hyperbolic_secant(double alpha = 1.0) {
    return make_generator(GeneratorClass::K, alpha, ComplexPoly{0.0, 1.0}, ComplexPoly{1.0, 0.0, 1.0});
}

/// The Gaussian e^{-alpha x^2/2}.
inline Generator gaussian(double alpha = 1.0) {
    return make_generator(GeneratorClass::C, alpha, ComplexPoly{1.0}, ComplexPoly{1.0});
}

}  // namespace sisamp
