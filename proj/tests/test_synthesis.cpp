#include <catch_amalgamated.hpp>

#include <random>

#include "zoo.hpp"

using namespace sisamp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SISFunction constant_coeffs(const Generator& g, const SeparatedSet& s, std::optional<double> rho = std::nullopt) {
    return SISFunction(g, s, [](double) { return cplx{1.0, 0.0}; }, 1.0, std::nullopt, rho);
}

}  // namespace

TEST_CASE("a single coefficient reproduces the generator", "[synthesis]") {
    const auto f = SISFunction::from_coeffs(hyperbolic_secant(), SeparatedSet::integers(), {0.0}, {1.0});
    CHECK_THAT(f(0.0).real(), WithinAbs(0.5, 1e-16));
    for (double x : {-3.3, 0.4, 1.3, 7.0}) CHECK_THAT(f(x).real(), WithinRel(zoo::hsec(x), 1e-14));
    const auto g = SISFunction::from_coeffs(hyperbolic_secant(), SeparatedSet::integers(), {2.0}, {cplx{0.0, 3.0}});
    CHECK(std::abs(g(2.5) - cplx{0.0, 3.0 * zoo::hsec(0.5)}) < 1e-15);
}

TEST_CASE("the telescoping generator sums to zero against constant coefficients", "[synthesis]") {
    const auto f = constant_coeffs(zoo::class_k()[6].g, SeparatedSet::integers());
    CHECK(f.tail_bound() <= 1e-11);
    for (double x : {0.0, 0.25, 0.5, 3.7, -11.2}) CHECK(std::abs(f(x)) <= f.tail_bound() + 1e-14);
}

TEST_CASE("constant coefficients: direct sum and Poisson sum", "[synthesis]") {
    const auto f = constant_coeffs(hyperbolic_secant(), SeparatedSet::integers());
    double direct = 0.0;
    for (int n = -80; n <= 80; ++n) direct += zoo::hsec(n);
    double poisson = 0.0;
    for (int k = -4; k <= 4; ++k) poisson += pi / 2.0 / std::cosh(pi * pi * k);
    CHECK_THAT(f(0.0).real(), WithinAbs(direct, 1e-12));
    CHECK_THAT(f(0.0).real(), WithinAbs(poisson, 1e-12));
    CHECK_THAT(f(0.0).real(), WithinAbs(1.5711213299678, 1e-12));
}

TEST_CASE("synthesis is linear in the coefficients", "[synthesis][property]") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const auto gamma = SeparatedSet::lattice(0.8);
    std::vector<double> pts;
    for (int m = -12; m <= 12; ++m) pts.push_back(0.8 * m);
    for (const auto& e : zoo::all()) {
        std::vector<cplx> a(pts.size()), b(pts.size()), ab(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            a[i] = {U(rng), U(rng)};
            b[i] = {U(rng), U(rng)};
            ab[i] = a[i] + 2.0 * b[i];
        }
        const auto fa = SISFunction::from_coeffs(e.g, gamma, pts, a);
        const auto fb = SISFunction::from_coeffs(e.g, gamma, pts, b);
        const auto fab = SISFunction::from_coeffs(e.g, gamma, pts, ab);
        for (double x : {-5.1, -0.3, 0.0, 2.2, 9.9}) {
            INFO(e.name << " x=" << x);
            const cplx lhs = fab(x), rhs = fa(x) + 2.0 * fb(x);
            // each function truncates at its own radius, so the three tails add up
            const double tails = fab.tail_bound() + fa.tail_bound() + 2.0 * fb.tail_bound();
            CHECK(std::abs(lhs - rhs) <= tails + 1e-13 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("truncation certificate holds under radius doubling", "[synthesis][property]") {
    std::mt19937_64 rng(45);
    std::uniform_real_distribution<double> X(-5.0, 5.0);
    for (const auto& e : zoo::all()) {
        const auto gamma = SeparatedSet::lattice(0.5);
        const auto f = constant_coeffs(e.g, gamma);
        const auto f2 = constant_coeffs(e.g, gamma, 2.0 * f.rho());
        CHECK(f.tail_bound() <= 1e-12);
        for (int i = 0; i < 20; ++i) {
            const double x = X(rng);
            INFO(e.name << " x=" << x);
            CHECK(std::abs(f(x) - f2(x)) <= f.tail_bound() + 1e-14 * std::abs(f2(x)));
        }
    }
}

TEST_CASE("explicit sets have a finite evaluation window", "[synthesis]") {
    std::vector<double> pts;
    for (int m = -40; m <= 40; ++m) pts.push_back(m);
    const auto gamma = SeparatedSet::explicit_points(pts, {-40.0, 40.0});
    const auto f = constant_coeffs(hyperbolic_secant(), gamma);
    const auto w = f.eval_window();
    CHECK(w.lo == Catch::Approx(-40.0 + f.rho()));
    CHECK(w.hi == Catch::Approx(40.0 - f.rho()));
    CHECK_THROWS_AS(f(w.hi + 0.5), DomainError);
    CHECK_THAT(f(0.0).real(), WithinAbs(1.5711213299678, 1e-11));
}

TEST_CASE("Bessel bounds for the standard examples", "[synthesis]") {
    for (int p : {1, 2, 0}) {
        const auto h = bessel_bound_check(hyperbolic_secant(), SeparatedSet::integers(), 5, p, 11);
        INFO("p=" << p);
        CHECK(h.passed);
        CHECK(h.covering == 2);
        const double expect = (p == 1 ? 1.0 : (p == 2 ? std::sqrt(2.0) : 2.0)) * 2.071121329968;
        CHECK_THAT(h.bound, WithinRel(expect, 1e-11));
        CHECK(h.max_ratio > 0.0);

        const auto g = bessel_bound_check(gaussian(), SeparatedSet::lattice(0.5), 3, p, 12);
        CHECK(g.passed);
        CHECK(g.covering == 3);
    }
    CHECK_THROWS_AS(bessel_bound_check(hyperbolic_secant(), SeparatedSet::integers(), 1, 3), DomainError);
    CHECK_THROWS_AS(bessel_bound_check(hyperbolic_secant(), SeparatedSet::integers(), 0, 2), DomainError);
}

TEST_CASE("a single spike obeys the Bessel bound", "[synthesis][property]") {
    // ||G||_p computed by a plain trapezoid sum, independent of the library grid norm
    for (const auto& e : zoo::all()) {
        double l1 = 0.0, l2 = 0.0, linf = 0.0;
        const double h = 1e-3;
        for (int i = -60000; i <= 60000; ++i) {
            const double v = std::abs(e.g(i * h));
            l1 += h * v;
            l2 += h * v * v;
            linf = std::max(linf, v);
        }
        const double w = wiener_norm(e.g);
        INFO(e.name);
        CHECK(l1 <= w);
        CHECK(std::sqrt(l2) <= w);
        CHECK(linf <= w);
    }
}
