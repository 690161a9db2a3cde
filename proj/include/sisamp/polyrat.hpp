#pragma once

// Complex polynomials and rational functions: evaluation, roots with
// multiplicities, coprimality and the coefficient-support gcd that governs the
// rotational symmetry of a rational function.

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <span>
#include <utility>
#include <vector>

#include "sisamp/common.hpp"

namespace sisamp {

inline constexpr int max_poly_degree = 64;

/// Polynomial with complex coefficients; coeffs()[j] multiplies z^j.
/// Trailing zero coefficients are trimmed, so the leading coefficient of a
/// non-zero polynomial is never zero. The zero polynomial has no coefficients
/// and degree -1.
class ComplexPoly {
public:
    ComplexPoly() = default;

    explicit ComplexPoly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
        while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
        if (degree() > max_poly_degree)
            throw DomainError("polynomial degree " + std::to_string(degree()) + " exceeds " +
                              std::to_string(max_poly_degree));
    }

    ComplexPoly(std::initializer_list<cplx> coeffs) : ComplexPoly(std::vector<cplx>(coeffs)) {}

    static ComplexPoly constant(cplx c) { return ComplexPoly(std::vector<cplx>{c}); }

    static ComplexPoly monomial(cplx c, int power) {
        std::vector<cplx> v(static_cast<std::size_t>(power) + 1);
        v.back() = c;
        return ComplexPoly(std::move(v));
    }

    /// lead * prod (z - r_i).
    static ComplexPoly from_roots(std::span<const cplx> roots, cplx lead = 1.0) {
        std::vector<cplx> v{lead};
        for (cplx r : roots) {
            std::vector<cplx> next(v.size() + 1);
            for (std::size_t j = 0; j < v.size(); ++j) {
                next[j + 1] += v[j];
                next[j] -= r * v[j];
            }
            v = std::move(next);
        }
        return ComplexPoly(std::move(v));
    }

    [[nodiscard]] bool is_zero() const { return c_.empty(); }
    [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] const std::vector<cplx>& coeffs() const { return c_; }
    [[nodiscard]] cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }

    [[nodiscard]] cplx operator[](int j) const {
        return (j >= 0 && j < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(j)] : cplx{};
    }

    /// Index of the lowest nonzero coefficient (order of the root at 0).
    [[nodiscard]] int lowest_power() const {
        for (std::size_t j = 0; j < c_.size(); ++j)
            if (c_[j] != cplx{}) return static_cast<int>(j);
        return -1;
    }

    /// Indices of the nonzero coefficients.
    [[nodiscard]] std::vector<int> support() const {
        std::vector<int> s;
        for (std::size_t j = 0; j < c_.size(); ++j)
            if (c_[j] != cplx{}) s.push_back(static_cast<int>(j));
        return s;
    }

    [[nodiscard]] cplx operator()(cplx z) const {
        cplx acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    /// sum_k |a_k| r^k, the natural scale for rounding errors of p(z) at |z| = r.
    [[nodiscard]] double magnitude_sum(double r) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
        return acc;
    }

    [[nodiscard]] double max_coeff() const {
        double m = 0.0;
        for (cplx a : c_) m = std::max(m, std::abs(a));
        return m;
    }

    [[nodiscard]] ComplexPoly derivative(int order = 1) const {
        std::vector<cplx> v = c_;
        for (int o = 0; o < order && !v.empty(); ++o) {
            std::vector<cplx> d(v.size() > 1 ? v.size() - 1 : 0);
            for (std::size_t j = 1; j < v.size(); ++j) d[j - 1] = static_cast<double>(j) * v[j];
            v = std::move(d);
        }
        return ComplexPoly(std::move(v));
    }

    /// z^deg p(1/z).
    [[nodiscard]] ComplexPoly reversed() const {
        return ComplexPoly(std::vector<cplx>(c_.rbegin(), c_.rend()));
    }

    /// p(z) / z^k for k <= lowest_power().
    [[nodiscard]] ComplexPoly shifted_down(int k) const {
        if (k <= 0) return *this;
        return ComplexPoly(std::vector<cplx>(c_.begin() + k, c_.end()));
    }

    /// Coefficients e_0..e_order of p(w + e) as a power series in e.
    [[nodiscard]] std::vector<cplx> taylor_at(cplx w, int order) const {
        std::vector<cplx> work = c_;
        std::vector<cplx> out(static_cast<std::size_t>(order) + 1);
        // Repeated synthetic division by (z - w).
        for (int j = 0; j <= order && !work.empty(); ++j) {
            cplx acc{};
            std::vector<cplx> quot(work.size() > 1 ? work.size() - 1 : 0);
            for (std::size_t i = work.size(); i-- > 0;) {
                acc = acc * w + work[i];
                if (i > 0) quot[i - 1] = acc;
            }
            out[static_cast<std::size_t>(j)] = acc;
            work = std::move(quot);
        }
        return out;
    }

    friend ComplexPoly operator+(const ComplexPoly& a, const ComplexPoly& b) {
        std::vector<cplx> v(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t j = 0; j < a.c_.size(); ++j) v[j] += a.c_[j];
        for (std::size_t j = 0; j < b.c_.size(); ++j) v[j] += b.c_[j];
        return ComplexPoly(std::move(v));
    }

    friend ComplexPoly operator-(const ComplexPoly& a, const ComplexPoly& b) { return a + (-1.0) * b; }

    friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<cplx> v(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
        return ComplexPoly(std::move(v));
    }

    friend ComplexPoly operator*(cplx s, const ComplexPoly& a) {
        std::vector<cplx> v = a.c_;
        for (auto& x : v) x *= s;
        return ComplexPoly(std::move(v));
    }

    [[nodiscard]] std::string to_string() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t j = 0; j < c_.size(); ++j)
            os << (j ? ", " : "") << '(' << c_[j].real() << ',' << c_[j].imag() << ')';
        os << ']';
        return os.str();
    }

private:
    std::vector<cplx> c_;
};

struct Root {
    cplx value;
    int multiplicity = 1;
};

struct RootOptions {
    int max_iterations = 500;
    int restarts = 4;
    double residual_tol = 1e-10;    ///< |p(r)| relative to magnitude_sum(|r|)
    double cluster_tol = 1e-7;      ///< merge radius relative to root magnitude
    double multiple_probe = 1e-3;   ///< candidate radius for multiple-root detection
    double multiple_tol = 1e-10;    ///< derivative test for an accepted multiple root
    std::uint64_t seed = 0x5eed'0f'a1b3ULL;
};

namespace detail {

inline double falling_factor(int k, int j) {
    double f = 1.0;
    for (int i = 0; i < j; ++i) f *= static_cast<double>(k - i);
    return f;
}

/// Aberth-Ehrlich simultaneous iteration; returns false when the cap is hit.
inline bool aberth(const ComplexPoly& p, std::vector<cplx>& z, int max_iter) {
    const ComplexPoly dp = p.derivative();
    const std::size_t n = z.size();
    std::vector<bool> done(n, false);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < max_iter; ++it) {
        bool all = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (done[k]) continue;
            const cplx pk = p(z[k]);
            if (std::abs(pk) <= 4.0 * eps * p.magnitude_sum(std::abs(z[k]))) {
                done[k] = true;
                continue;
            }
            all = false;
            const cplx ratio = pk / dp(z[k]);
            cplx s{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            const cplx corr = ratio / (1.0 - ratio * s);
            if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) return false;
            z[k] -= corr;
            if (std::abs(corr) <= 2.0 * eps * std::abs(z[k])) done[k] = true;
        }
        if (all) return true;
    }
    return std::all_of(done.begin(), done.end(), [](bool b) { return b; });
}

inline bool is_multiple_root(const ComplexPoly& p, cplx& c, int m, double tol) {
    // A root of multiplicity m is a simple root of p^(m-1); polish it there.
    const ComplexPoly dm1 = p.derivative(m - 1);
    const ComplexPoly dm = p.derivative(m);
    cplx x = c;
    for (int it = 0; it < 50; ++it) {
        const cplx d = dm(x);
        if (d == cplx{}) break;
        const cplx step = dm1(x) / d;
        x -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    const double r = std::abs(x);
    for (int j = 0; j < m; ++j) {
        const ComplexPoly dj = p.derivative(j);
        double scale = 0.0;
        for (int k = j; k <= p.degree(); ++k)
            scale += std::abs(p[k]) * falling_factor(k, j) * std::pow(r, k - j);
        if (std::abs(dj(x)) > tol * scale) return false;
    }
    c = x;
    return true;
}

/// Single-linkage clusters of indices under a relative radius.
inline std::vector<std::vector<std::size_t>> link_clusters(const std::vector<cplx>& z, double rel) {
    const std::size_t n = z.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = std::max({std::abs(z[i]), std::abs(z[j]), 1e-300});
            if (std::abs(z[i] - z[j]) <= rel * scale) parent[find(i)] = find(j);
        }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(slot[r])].push_back(i);
    }
    return groups;
}

inline cplx centroid(const std::vector<cplx>& z, const std::vector<std::size_t>& idx) {
    cplx c{};
    for (auto i : idx) c += z[i];
    return c / static_cast<double>(idx.size());
}

}  // namespace detail

/// Roots of p with multiplicities (summing to degree(p)). Exact zero roots are
/// split off first; the rest come from Aberth-Ehrlich iteration followed by
/// cluster analysis.
inline std::vector<Root> poly_roots(const ComplexPoly& p, const RootOptions& opt = {}) {
    if (p.is_zero() || p.degree() < 1)
        throw DomainError("poly_roots needs a polynomial of degree >= 1, got " + p.to_string());

    std::vector<Root> out;
    const int z0 = p.lowest_power();
    if (z0 > 0) out.push_back({cplx{}, z0});
    const ComplexPoly d = p.shifted_down(z0);
    const int n = d.degree();
    if (n == 0) return out;
    if (n == 1) {
        out.push_back({-d[0] / d[1], 1});
        return out;
    }

    const ComplexPoly monic = (1.0 / d.leading()) * d;
    const double radius = std::pow(std::abs(monic[0]), 1.0 / n);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> jitter(0.8, 1.25);

    std::vector<cplx> z(static_cast<std::size_t>(n));
    bool converged = false;
    for (int attempt = 0; attempt <= opt.restarts && !converged; ++attempt) {
        const double r0 = attempt == 0 ? radius : radius * jitter(rng);
        const double phase0 = attempt == 0 ? 0.4 : 6.0 * jitter(rng);
        for (int k = 0; k < n; ++k)
            z[static_cast<std::size_t>(k)] = std::polar(r0 > 0 ? r0 : 1.0, phase0 + two_pi * k / n);
        converged = detail::aberth(monic, z, opt.max_iterations);
    }
    if (!converged)
        throw ConvergenceError("root finder did not converge for polynomial " + p.to_string());

    for (cplx r : z) {
        if (std::abs(monic(r)) > opt.residual_tol * monic.magnitude_sum(std::abs(r)))
            throw ConvergenceError("root residual too large for polynomial " + p.to_string());
    }

    for (const auto& group : detail::link_clusters(z, opt.multiple_probe)) {
        const int m = static_cast<int>(group.size());
        cplx c = detail::centroid(z, group);
        if (m == 1 || detail::is_multiple_root(monic, c, m, opt.multiple_tol)) {
            out.push_back({m == 1 ? z[group.front()] : c, m});
            continue;
        }
        // Not a genuine multiple root: fall back to tight merging.
        std::vector<cplx> sub;
        for (auto i : group) sub.push_back(z[i]);
        for (const auto& g2 : detail::link_clusters(sub, opt.cluster_tol))
            out.push_back({detail::centroid(sub, g2), static_cast<int>(g2.size())});
    }
    return out;
}

/// True when no root of q is (numerically) a root of p. The test value is
/// |p(r)| against tol * sum_k |p_k| max(1,|r|)^k.
inline bool coprime_check(const ComplexPoly& p, const ComplexPoly& q, double tol = 1e-9) {
    if (p.is_zero() || q.is_zero()) throw DomainError("coprime_check needs non-zero polynomials");
    if (p.degree() < 1 || q.degree() < 1) return true;
    for (const Root& r : poly_roots(q)) {
        const double scale = p.magnitude_sum(std::max(1.0, std::abs(r.value)));
        if (std::abs(p(r.value)) <= tol * scale) return false;
    }
    return true;
}

/// gcd of all index differences inside supp(P) and inside supp(Q); nullopt
/// when both supports are single points (no finite largest symmetry order).
inline std::optional<int> support_gcd(const ComplexPoly& p, const ComplexPoly& q) {
    if (p.is_zero() || q.is_zero()) throw DomainError("support_gcd needs non-zero polynomials");
    int g = 0;
    for (const auto& poly : {p, q}) {
        const auto s = poly.support();
        for (std::size_t i = 1; i < s.size(); ++i) g = std::gcd(g, s[i] - s[0]);
    }
    if (g == 0) return std::nullopt;
    return g;
}

struct Pole {
    cplx location;
    int order = 1;
};

/// R = P/Q with P, Q coprime and the poles (roots of Q) cached.
class RationalFn {
public:
    RationalFn() = default;

    RationalFn(ComplexPoly num, ComplexPoly den) : p_(std::move(num)), q_(std::move(den)) {
        if (p_.is_zero()) throw DomainError("rational function numerator is the zero polynomial");
        if (q_.is_zero()) throw DomainError("rational function denominator is the zero polynomial");
        if (!coprime_check(p_, q_))
            throw DomainError("numerator " + p_.to_string() + " and denominator " + q_.to_string() +
                              " share a root");
        if (q_.degree() >= 1)
            for (const Root& r : poly_roots(q_)) poles_.push_back({r.value, r.multiplicity});
    }

    [[nodiscard]] const ComplexPoly& num() const { return p_; }
    [[nodiscard]] const ComplexPoly& den() const { return q_; }
    [[nodiscard]] const std::vector<Pole>& poles() const { return poles_; }

    [[nodiscard]] int max_pole_order() const {
        int d = 0;
        for (const auto& pl : poles_) d = std::max(d, pl.order);
        return d;
    }

private:
    ComplexPoly p_;
    ComplexPoly q_;
    std::vector<Pole> poles_;
};

inline constexpr double pole_threshold = 1e-13;

/// P(z)/Q(z), or nullopt when z sits on a pole (|Q(z)| below pole_threshold
/// relative to the evaluation scale). Large |z| is handled through the
/// reversed polynomials so that no power of z is formed explicitly.
inline std::optional<cplx> rational_eval(const RationalFn& r, cplx z) {
    const ComplexPoly& p = r.num();
    const ComplexPoly& q = r.den();
    const double az = std::abs(z);
    if (az <= 1.0) {
        const cplx den = q(z);
        if (std::abs(den) <= pole_threshold * q.magnitude_sum(az)) return std::nullopt;
        return p(z) / den;
    }
    const cplx v = 1.0 / z;
    const cplx den = q.reversed()(v);
    if (std::abs(den) <= pole_threshold * q.reversed().magnitude_sum(1.0 / az)) return std::nullopt;
    const cplx ratio = p.reversed()(v) / den;
    return ratio * std::pow(z, p.degree() - q.degree());
}

}  // namespace sisamp
