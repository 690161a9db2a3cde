#include <catch_amalgamated.hpp>

#include <random>

#include "sisamp/sets.hpp"

using namespace sisamp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Brute-force count of offsets + period*m (|m| <= 50) inside a closed window.
std::size_t brute_count(const std::vector<double>& offsets, double period, double lo, double hi) {
    std::size_t n = 0;
    for (long m = -50; m <= 50; ++m)
        for (double o : offsets) {
            const double x = o + period * static_cast<double>(m);
            if (x >= lo && x <= hi) ++n;
        }
    return n;
}

}  // namespace

TEST_CASE("exact densities of periodic sets", "[sets]") {
    const auto z = beurling_densities(SeparatedSet::integers());
    CHECK(z.exact);
    CHECK(z.d_minus == 1.0);
    CHECK(z.d_plus == 1.0);
    const auto two = beurling_densities(SeparatedSet::periodic({0.0, 0.3}, 1.0));
    CHECK(two.d_minus == 2.0);
    CHECK(two.d_plus == 2.0);
    const auto l = beurling_densities(SeparatedSet::lattice(0.8));
    CHECK_THAT(l.d_minus, WithinRel(1.25, 1e-15));
    CHECK_THAT(l.d_plus, WithinRel(1.25, 1e-15));
}

TEST_CASE("construction rejects unseparated input", "[sets]") {
    CHECK_THROWS_AS(SeparatedSet::periodic({0.2, 0.2}, 1.0), DomainError);
    CHECK_THROWS_AS(SeparatedSet::periodic({0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(SeparatedSet::periodic({0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(SeparatedSet::explicit_points({1.0, 1.0, 2.0}, {0.0, 3.0}), DomainError);
    CHECK_THROWS_AS(SeparatedSet::explicit_points({1.0, 4.0}, {0.0, 3.0}), DomainError);
}

TEST_CASE("periodic offsets are normalized and separation spans the seam", "[sets]") {
    const auto s = SeparatedSet::periodic({1.9, -0.05, 0.4}, 1.0);
    const auto* p = s.as_periodic();
    REQUIRE(p);
    REQUIRE(p->offsets.size() == 3);
    CHECK_THAT(p->offsets[0], WithinAbs(0.4, 1e-14));
    CHECK_THAT(p->offsets[1], WithinAbs(0.9, 1e-14));
    CHECK_THAT(p->offsets[2], WithinAbs(0.95, 1e-14));
    CHECK_THAT(s.separation(), WithinAbs(0.05, 1e-14));
}

TEST_CASE("covering constants", "[sets]") {
    CHECK(covering_constant(SeparatedSet::integers()) == 2);
    CHECK(covering_constant(SeparatedSet::lattice(2.0)) == 1);
    CHECK(covering_constant(SeparatedSet::periodic({0.0, 0.5}, 1.0)) == 3);
    CHECK(covering_constant(SeparatedSet::lattice(0.8)) == 2);
    CHECK(covering_constant(SeparatedSet::lattice(0.5)) == 3);
}

TEST_CASE("covering constant agrees with a brute scan", "[sets][property]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double T = 0.5 + 2.0 * U(rng);
        std::vector<double> off{0.0, 0.25 * T + 0.1 * U(rng), 0.6 * T + 0.1 * U(rng)};
        const auto s = SeparatedSet::periodic(off, T);
        std::size_t best = 0;
        for (int i = 0; i <= 20000; ++i) {
            const double x = -T + 2.0 * T * i / 20000.0;
            best = std::max(best, brute_count(s.as_periodic()->offsets, T, x, x + 1.0));
        }
        // the brute scan can only miss the supremum, never exceed it
        CHECK(static_cast<std::size_t>(covering_constant(s)) >= best);
        CHECK(static_cast<std::size_t>(covering_constant(s)) <= best + 1);
    }
}

TEST_CASE("transforms", "[sets]") {
    const auto t = translate(SeparatedSet::integers(), 0.25);
    CHECK_THAT(t.as_periodic()->offsets[0], WithinAbs(0.25, 1e-15));
    CHECK(beurling_densities(t).d_minus == 1.0);
    const auto s = scale(SeparatedSet::integers(), 0.8);
    CHECK_THAT(beurling_densities(s).d_plus, WithinRel(1.25, 1e-15));
    CHECK_THROWS_AS(scale(SeparatedSet::integers(), 0.0), DomainError);

    const auto r = restrict_to(SeparatedSet::periodic({0.0, 0.3}, 1.0), {-5.0, 5.0});
    REQUIRE(r.as_explicit());
    CHECK(r.count_in({-5.0, 5.0}) == brute_count({0.0, 0.3}, 1.0, -5.0, 5.0));
    CHECK(r.count_in({-5.0, 5.0}) == 21);
    CHECK_THROWS_AS(restrict_to(SeparatedSet::lattice(10.0), {0.5, 3.0}), DomainError);
}

TEST_CASE("density scaling law under scale and translate", "[sets][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.1, 3.0);
    const auto base = SeparatedSet::periodic({0.0, 0.2, 0.55}, 1.3);
    const double d = beurling_densities(base).d_minus;
    for (int i = 0; i < 25; ++i) {
        const double a = U(rng), delta = U(rng) - 1.5;
        const auto s = translate(scale(base, a), delta);
        const auto ds = beurling_densities(s);
        CHECK_THAT(ds.d_minus, WithinRel(d / a, 1e-13));
        CHECK_THAT(ds.d_plus, WithinRel(d / a, 1e-13));
    }
}

TEST_CASE("windowed density of a restricted lattice converges", "[sets][property]") {
    const auto base = SeparatedSet::periodic({0.0, 0.3}, 1.0);
    for (double R : {5.0, 20.0, 80.0}) {
        const auto r = restrict_to(base, {-4.0 * R, 4.0 * R});
        const auto d = beurling_densities(r, R);
        CHECK_FALSE(d.exact);
        CHECK(d.d_minus <= d.d_plus);
        CHECK(std::abs(d.d_minus - 2.0) <= 2.0 / R);
        CHECK(std::abs(d.d_plus - 2.0) <= 2.0 / R);
    }
    CHECK_THROWS_AS(beurling_densities(restrict_to(base, {-3.0, 3.0}), 4.0), DomainError);
    CHECK_THROWS_AS(beurling_densities(restrict_to(base, {-3.0, 3.0})), DomainError);
}

TEST_CASE("explicit density extremes match a fine centre scan", "[sets][property]") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> gap(0.3, 1.7);
    std::vector<double> pts;
    double x = -30.0;
    while (x < 30.0) {
        pts.push_back(x);
        x += gap(rng);
    }
    const auto s = SeparatedSet::explicit_points(pts, {-30.0, 30.0});
    const double R = 3.0;
    const auto d = beurling_densities(s, R);
    double lo = 1e9, hi = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double c = -27.0 + 54.0 * i / 200000.0;
        double n = 0;
        for (double p : pts) n += (p >= c - R && p <= c + R) ? 1.0 : 0.0;
        lo = std::min(lo, n / (2 * R));
        hi = std::max(hi, n / (2 * R));
    }
    CHECK(d.d_minus <= lo + 1e-15);
    CHECK(d.d_plus >= hi - 1e-15);
    CHECK(d.d_plus - hi <= 1.0 / (2 * R) + 1e-15);
    CHECK(lo - d.d_minus <= 1.0 / (2 * R) + 1e-15);
}

TEST_CASE("repeat and unite keep the point set", "[sets]") {
    const auto s = SeparatedSet::periodic({0.1, 0.6}, 1.0);
    const auto r = repeat_period(s, 3);
    CHECK(r.as_periodic()->offsets.size() == 6);
    const auto a = r.points_in({-4.0, 4.0}), b = s.points_in({-4.0, 4.0});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK_THAT(a[i], WithinAbs(b[i], 1e-12));
    const auto u = unite(SeparatedSet::integers(), SeparatedSet::lattice(1.0, 0.5));
    CHECK(beurling_densities(u).d_minus == 2.0);
    CHECK_THROWS_AS(unite(SeparatedSet::integers(), SeparatedSet::lattice(2.0)), DomainError);
}
