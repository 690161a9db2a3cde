#include <catch_amalgamated.hpp>

#include <Eigen/SVD>

#include "zoo.hpp"

using namespace sisamp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// inf over xi of sigma_min(S(xi))^2, S(xi)[i][j] = sum_m G(l_i - g_j - mP) e^{2 pi i m xi},
// with l, g one period of each set; sampled at n_xi frequencies in [0, 1).
double symbol_lower_bound(const Generator& g, const std::vector<double>& l, const std::vector<double>& gm, double P,
                          int n_xi) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_xi; ++k) {
        const double xi = static_cast<double>(k) / n_xi;
        Eigen::MatrixXcd S(static_cast<Eigen::Index>(l.size()), static_cast<Eigen::Index>(gm.size()));
        for (std::size_t i = 0; i < l.size(); ++i)
            for (std::size_t j = 0; j < gm.size(); ++j) {
                cplx s{};
                for (int m = -60; m <= 60; ++m)
                    s += g(l[i] - gm[j] - m * P) * std::exp(cplx{0.0, two_pi * m * xi});
                S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
            }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
        const auto& sv = svd.singularValues();
        best = std::min(best, sv(sv.size() - 1) * sv(sv.size() - 1));
    }
    return best;
}

FrameOptions no_stability(std::vector<double> windows = {}) {
    FrameOptions o;
    o.windows = std::move(windows);
    o.check_stability = false;
    return o;
}

}  // namespace

TEST_CASE("pre-Gramian shape and entries", "[frames]") {
    const auto g = hyperbolic_secant();
    const auto pz = pre_gramian(g, SeparatedSet::integers(), SeparatedSet::integers(), 10.0);
    CHECK(pz.lambda_pts.size() == 21);
    const auto p8 = pre_gramian(g, SeparatedSet::lattice(0.8), SeparatedSet::integers(), 20.0);
    CHECK(p8.lambda_pts.size() == 51);
    CHECK(p8.entries.rows() == 51);
    CHECK(p8.gamma_pts.front() <= -20.0 - p8.L_ext + 1.0);
    const auto& env = g.decay();
    for (Eigen::Index i = 0; i < p8.entries.rows(); ++i)
        for (Eigen::Index j = 0; j < p8.entries.cols(); ++j) {
            const double d = p8.lambda_pts[static_cast<std::size_t>(i)] - p8.gamma_pts[static_cast<std::size_t>(j)];
            CHECK(std::abs(p8.entries(i, j) - zoo::hsec(d)) <= 1e-15);
            CHECK(std::abs(p8.entries(i, j)) <= env(d) * (1.0 + 1e-12));
        }
    CHECK_THROWS_AS(pre_gramian(g, SeparatedSet::integers(), SeparatedSet::integers(), 0.0), DomainError);
}

TEST_CASE("periodic section matches the block-symbol oracle", "[frames]") {
    const auto g = hyperbolic_secant();
    const auto fb = periodic_frame_bound(g, SeparatedSet::lattice(0.8), SeparatedSet::integers(), 80.0);
    const double oracle = symbol_lower_bound(g, {0.0, 0.8, 1.6, 2.4, 3.2}, {0.0, 1.0, 2.0, 3.0}, 4.0, 400);
    CHECK(fb.rows == 320);
    CHECK(fb.cols == 256);
    CHECK_THAT(fb.A_est, WithinRel(oracle, 1e-6));
    CHECK_THAT(fb.A_est, WithinRel(1.2760175e-3, 1e-6));
    CHECK(fb.residual < eigen_residual_tol);

    const auto gs = gaussian();
    const auto fg = periodic_frame_bound(gs, SeparatedSet::periodic({0.0, 0.45}, 1.0), SeparatedSet::integers(), 16.0);
    const double og = symbol_lower_bound(gs, {0.0, 0.45}, {0.0}, 1.0, 32);
    CHECK_THAT(fg.A_est, WithinRel(og, 1e-9));
}

TEST_CASE("open section approaches the periodic section", "[frames]") {
    const auto g = hyperbolic_secant();
    const auto lambda = SeparatedSet::lattice(0.8);
    const auto Z = SeparatedSet::integers();
    const double ref = periodic_frame_bound(g, lambda, Z, 80.0).A_est;
    double prev = std::numeric_limits<double>::infinity();
    for (double W : {10.0, 20.0, 40.0, 80.0}) {
        const auto fb = lower_frame_bound(pre_gramian(g, lambda, Z, W), default_interior_margin(g, W));
        INFO("W=" << W);
        CHECK(fb.A_est >= ref * (1.0 - 1e-9));
        CHECK(fb.A_est <= prev * (1.0 + 1e-9));
        prev = fb.A_est;
    }
    CHECK_THAT(prev, WithinRel(ref, 0.05));
}

TEST_CASE("sampling verdicts at the two lattice spacings", "[frames]") {
    const auto g = hyperbolic_secant();
    const auto Z = SeparatedSet::integers();
    const auto r8 = sampling_verdict(g, SeparatedSet::lattice(0.8), Z);
    CHECK(r8.verdict == SamplingVerdict::sampling);
    CHECK(r8.estimator == "periodic-section");
    CHECK(r8.stability.find("stable") != std::string::npos);
    CHECK_THAT(r8.lower_bounds.back(), WithinRel(1.2760175e-3, 1e-6));
    CHECK(r8.threshold_context.hypothesis_holds);

    const auto r2 = sampling_verdict(g, SeparatedSet::lattice(2.0), Z);
    CHECK(r2.verdict == SamplingVerdict::not_sampling);
    CHECK_FALSE(r2.threshold_context.hypothesis_holds);
    for (std::size_t i = 1; i < r2.lower_bounds.size(); ++i)
        CHECK(r2.lower_bounds[i] <= 0.5 * r2.lower_bounds[i - 1]);

    auto bad = no_stability({20.0, 10.0});
    CHECK_THROWS_AS(sampling_verdict(g, SeparatedSet::lattice(0.8), Z, bad), DomainError);
}

TEST_CASE("verdict classification rules", "[frames]") {
    CHECK(classify({1e-3, 1.01e-3, 1.0e-3}, 1e-6, 0.05) == SamplingVerdict::sampling);
    CHECK(classify({1e-3, 4e-4, 1e-4}, 1e-6, 0.05) == SamplingVerdict::not_sampling);
    CHECK(classify({1e-3, 9e-4, 5e-4}, 1e-6, 0.05) == SamplingVerdict::inconclusive);
    CHECK(classify({1e-7, 1e-7, 1e-7}, 1e-6, 0.05) != SamplingVerdict::sampling);
}

TEST_CASE("joint translation leaves the bounds unchanged", "[frames][property]") {
    const auto g = hyperbolic_secant();
    const auto l = SeparatedSet::periodic({0.0, 0.35, 0.7}, 2.0);
    const auto Z = SeparatedSet::integers();
    const double base = periodic_frame_bound(g, l, Z, 16.0).A_est;
    for (double d : {0.13, 0.5, -0.77}) {
        const double moved = periodic_frame_bound(g, translate(l, d), translate(Z, d), 16.0).A_est;
        CHECK_THAT(moved, WithinRel(base, 1e-9));
    }
}

TEST_CASE("adding sampling points cannot lower the bound", "[frames][property]") {
    const auto g = hyperbolic_secant();
    const auto Z = SeparatedSet::integers();
    const double coarse = periodic_frame_bound(g, SeparatedSet::lattice(0.8), Z, 16.0).A_est;
    const double fine = periodic_frame_bound(g, SeparatedSet::lattice(0.4), Z, 16.0).A_est;
    CHECK(fine >= coarse * (1.0 - 1e-12));
    const auto pg8 = pre_gramian(g, SeparatedSet::lattice(0.8), Z, 20.0);
    const auto pg4 = pre_gramian(g, SeparatedSet::lattice(0.4), Z, 20.0);
    CHECK(lower_frame_bound(pg4, 5.0).A_est >= lower_frame_bound(pg8, 5.0).A_est * (1.0 - 1e-12));
}

TEST_CASE("upper bound stays below the Schur test", "[frames][property]") {
    for (const auto& e : zoo::all()) {
        const auto pg = pre_gramian(e.g, SeparatedSet::lattice(0.8), SeparatedSet::integers(), 15.0);
        const auto fb = lower_frame_bound(pg, 3.0);
        INFO(e.name);
        CHECK(fb.B_est <= schur_bound(pg, e.g) * (1.0 + 1e-12));
        CHECK(fb.A_est <= fb.B_est);
    }
}

TEST_CASE("interpolation of a unit spike", "[frames]") {
    const auto g = hyperbolic_secant();
    const auto lambda = SeparatedSet::lattice(0.8);
    const auto Z = SeparatedSet::integers();
    const double W = 20.0;
    const auto gp = Z.points_in({-W, W});
    std::vector<cplx> target(gp.size());
    for (std::size_t i = 0; i < gp.size(); ++i) target[i] = gp[i] == 0.0 ? 1.0 : 0.0;
    const auto r = interpolate(g, lambda, Z, target, W);
    CHECK(r.max_residual < 1e-10);
    CHECK(r.condition < 1e6);
    CHECK(r.rows == 41);

    const auto frames = sampling_verdict(g, SeparatedSet::lattice(2.0), Z, no_stability());
    CHECK_THROWS_AS(interpolate_demo(g, SeparatedSet::lattice(2.0), Z, target, W, frames), DomainError);
    std::vector<cplx> short_target(3, 1.0);
    CHECK_THROWS_AS(interpolate(g, lambda, Z, short_target, W), DomainError);
}

TEST_CASE("Gabor sweep on a small x grid", "[frames]") {
    const auto g = hyperbolic_secant();
    const auto r = gabor_frame_sweep(g, SeparatedSet::lattice(0.8), 4, no_stability());
    CHECK(r.verdict == GaborVerdict::frame);
    REQUIRE(r.xs.size() == 4);
    CHECK(r.xs[2] == 0.5);
    CHECK(r.inf_lower <= r.last_lower[0]);
    CHECK(r.inf_lower > 1e-4);

    const auto n = gabor_frame_sweep(g, SeparatedSet::lattice(2.0), 2, no_stability());
    CHECK(n.verdict == GaborVerdict::no_frame);
    CHECK_THROWS_AS(gabor_frame_sweep(g, SeparatedSet::lattice(0.8), 0), DomainError);
}
